// Copyright 2026 The bloch_relax Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <unsupported/Eigen/MatrixFunctions>

#include "bloch_relax/analytic.hpp"
#include "bloch_relax/dynamics.hpp"
#include "bloch_relax/errors.hpp"
#include "support.hpp"

using namespace bloch_relax;
using doctest::Approx;
using std::numbers::pi;
using test_support::random_state;

namespace {

const double kE2 = std::exp(2.0);

// exp of the augmented generator [[M, k], [0, 0]] applied to (r, 1).
Vec3 affine_flow(const LindbladChannel& ch, const Vec3& r0, double t) {
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g.topLeftCorner<3, 3>() = ch.linear_part();
  g.topRightCorner<3, 1>() = ch.offset();
  const Eigen::Matrix4d e = (g * t).exp();
  Eigen::Vector4d y;
  y << r0, 1.0;
  return (e * y).head<3>();
}

}  // namespace

TEST_CASE("closed forms agree with the matrix-exponential oracle") {
  const auto ad = amplitude_damping(kE2 - 1, 2.0);
  const auto dp = depolarizing(0.1, 0.45, 0.8);
  const auto pd = phase_damping(0.6);
  for (int i = 0; i < 200; ++i) {
    const auto s = random_state();
    const double t = test_support::uniform(0.0, 3.0);
    CHECK((closed_form_ad(s, t, kE2 - 1, 2.0).vec() - affine_flow(ad, s.vec(), t)).norm() < 1e-12);
    CHECK((closed_form_dp(s, t, 0.1, 0.45, 0.8).vec() - affine_flow(dp, s.vec(), t)).norm() <
          1e-12);
    CHECK((closed_form_pd(s, t, 0.6).vec() - affine_flow(pd, s.vec(), t)).norm() < 1e-12);
  }
}

TEST_CASE("closed form limits") {
  const auto s = BlochState(0.2, -0.5, 0.6);
  CHECK(closed_form_ad(s, 0.0, 1.3, 0.7) == s);
  CHECK(closed_form_dp(s, 0.0, 0.2, 0.3, 0.4) == s);
  CHECK(closed_form_pd(s, 0.0, 0.5) == s);
  CHECK((closed_form_ad(s, 200.0, 1.3, 0.7).vec() - Vec3(0, 0, -std::tanh(0.35))).norm() < 1e-14);
  CHECK(closed_form_dp(s, 200.0, 0.2, 0.3, 0.4).norm() < 1e-14);
  for (double t : {0.1, 1.0, 10.0}) {
    CHECK(closed_form_pd(s, t, 0.5).z() == s.z());
    const auto fp = BlochState(0, 0, -std::tanh(1.0));
    CHECK((closed_form_ad(fp, t, kE2 - 1, 2.0).vec() - fp.vec()).norm() < 1e-15);
  }
}

TEST_CASE("controlled right-hand side matches the density-matrix oracle") {
  const std::vector<LindbladChannel> chans = {amplitude_damping(1.2, 0.9), depolarizing(0.3, 0.1, 0.6),
                                              phase_damping(0.5),
                                              test_support::random_generic_channel(3)};
  for (const auto& ch : chans) {
    for (int i = 0; i < 100; ++i) {
      const auto s = random_state();
      const Vec3 h = test_support::uniform(0, 3) * test_support::random_direction();
      CHECK((bloch_rhs(ch, h, s.vec()) - test_support::oracle_velocity(ch, h, s.vec())).norm() <
            1e-11);
    }
  }
}

TEST_CASE("evolve without control reproduces the closed forms") {
  const double gamma = kE2 - 1;
  const auto ad = amplitude_damping(gamma, 2.0);
  IntegratorConfig cfg;
  cfg.t_max = 1.0 / gamma;
  for (int i = 0; i < 20; ++i) {
    const auto s = random_state();
    const auto traj = evolve(ad, zero_field(), s, cfg);
    CHECK((traj.final_state().vec() - closed_form_ad(s, cfg.t_max, gamma, 2.0).vec()).norm() <
          1e-8);
  }

  const auto dp = depolarizing(0.2, 0.7, 1.1);
  cfg.t_max = 5.0 / dp.reference_rate();
  const auto s = random_state();
  const auto traj = evolve(dp, zero_field(), s, cfg);
  for (int k = 0; k <= 100; ++k) {
    const double t = traj.t_end() * k / 100.0;
    const Vec3 diff = traj.at(t).vec() - closed_form_dp(s, t, 0.2, 0.7, 1.1).vec();
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("trajectory invariants") {
  const auto ad = amplitude_damping(2.0, 1.0);
  IntegratorConfig cfg;
  cfg.t_max = 3.0;
  const auto traj = evolve(ad, constant_field(Vec3(0.3, -1.0, 2.0)), BlochState(0.6, 0.1, 0.7), cfg);
  REQUIRE(traj.samples().size() > 2);
  CHECK(traj.samples().front().t == 0.0);
  CHECK(traj.t_end() == Approx(3.0).epsilon(1e-15));
  for (std::size_t i = 1; i < traj.samples().size(); ++i) {
    CHECK(traj.samples()[i].t > traj.samples()[i - 1].t);
    CHECK(traj.samples()[i].state.norm() <= 1.0 + 1e-12);
  }
  CHECK(traj.reason() == TerminalReason::horizon);
  CHECK(traj.stats().accepted == static_cast<long>(traj.steps().size()));
  CHECK((traj.at(traj.samples()[3].t).vec() - traj.samples()[3].state.vec()).norm() < 1e-15);
  CHECK_THROWS_AS(traj.at(3.5), DomainError);

  const std::string csv = trajectory_csv(traj);
  CHECK(csv.rfind("t,r_x,r_y,r_z,purity\n", 0) == 0);
  CHECK(csv == trajectory_csv(evolve(ad, constant_field(Vec3(0.3, -1.0, 2.0)),
                                     BlochState(0.6, 0.1, 0.7), cfg)));
}

TEST_CASE("symmetry and equilibrium cases") {
  const double gamma = 1.5, beta = 1.2;
  const auto ad = amplitude_damping(gamma, beta);
  IntegratorConfig cfg;
  cfg.t_max = 2.0;
  const auto s = BlochState(0, 0, 0.4);
  const auto traj = evolve(ad, constant_field(Vec3(0, 0, 3.0)), s, cfg);
  for (const auto& smp : traj.samples()) {
    CHECK((smp.state.vec() - closed_form_ad(s, smp.t, gamma, beta).vec()).norm() < 1e-9);
  }

  const auto fp = BlochState(0, 0, -std::tanh(beta / 2));
  const auto still = evolve(ad, zero_field(), fp, cfg);
  CHECK((still.final_state().vec() - fp.vec()).norm() < 1e-14);
  CHECK(still.reason() == TerminalReason::stalled);
}

TEST_CASE("pure control conserves purity") {
  const LindbladChannel none({});
  IntegratorConfig cfg;
  cfg.t_max = 5.0;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-14;
  for (int i = 0; i < 10; ++i) {
    const auto s = random_state();
    const auto traj =
        evolve(none, [](double t) { return Vec3(std::sin(t), 1.0, std::cos(3 * t)); }, s, cfg);
    for (const auto& smp : traj.samples()) CHECK(std::abs(purity(smp.state) - purity(s)) < 1e-10);
  }
}

TEST_CASE("integrator failures") {
  const auto ad = amplitude_damping(1.0, 1.0);
  IntegratorConfig cfg;
  cfg.t_max = -1.0;
  CHECK_THROWS_AS(evolve(ad, zero_field(), BlochState(0, 0, 0), cfg), DomainError);
  cfg.t_max = 10.0;
  cfg.max_steps = 3;
  CHECK_THROWS_AS(evolve(ad, constant_field(Vec3(0, 100, 0)), BlochState(0.5, 0, 0), cfg),
                  NumericalError);
}

TEST_CASE("time to ball: free amplitude damping") {
  const double gamma = kE2 - 1;
  const analytic::AdParams p{gamma, 2.0};
  const auto ad = amplitude_damping(gamma, 2.0);
  const auto fp = BlochState(0, 0, -p.r_fp());
  IntegratorConfig cfg;
  cfg.t_max = 20.0;
  for (int i = 0; i < 30; ++i) {
    const auto s = random_state();
    const double eps = 0.04;
    if ((s.vec() - fp.vec()).norm() <= eps) continue;
    const auto t = time_to_ball(ad, zero_field(), s, fp, eps, cfg);
    REQUIRE(t.has_value());
    CHECK(*t == Approx(analytic::t_free_ad(s, eps, p)).epsilon(1e-6));
    // The located time is an exact crossing of the closed-form solution.
    CHECK(std::abs((closed_form_ad(s, *t, gamma, 2.0).vec() - fp.vec()).norm() - eps) < 1e-9);
  }
}

TEST_CASE("time to ball: boundary and degenerate cases") {
  const auto ad = amplitude_damping(1.0, 1.0);
  const auto center = BlochState(0, 0, -std::tanh(0.5));
  IntegratorConfig cfg;
  cfg.t_max = 5.0;
  const auto on_edge = BlochState(center.vec() + Vec3(0.1, 0, 0));
  CHECK(time_to_ball(ad, zero_field(), on_edge, center, 0.1, cfg) == 0.0);

  const auto pd = phase_damping(0.7);
  const auto s = BlochState(0, 0, 0.3);
  CHECK(time_to_ball(pd, zero_field(), s, s, 0.01, cfg) == 0.0);

  // Target never reached before the horizon.
  cfg.t_max = 0.01;
  CHECK_FALSE(time_to_ball(ad, zero_field(), BlochState(0, 0, 1), center, 0.01, cfg).has_value());
  CHECK_THROWS_AS(time_to_ball(ad, zero_field(), s, center, 0.0, cfg), DomainError);
}

TEST_CASE("property: time to ball is antitone in eps") {
  const auto ch = depolarizing(0.3, 0.6, 0.2);
  IntegratorConfig cfg;
  cfg.t_max = 50.0;
  for (int i = 0; i < 10; ++i) {
    const auto s = random_state(0.5, 1.0);
    const Vec3 h = test_support::random_direction();
    double prev = std::numeric_limits<double>::infinity();
    for (double eps = 0.01; eps < 0.5; eps *= 1.5) {
      const auto t = time_to_ball(ch, constant_field(h), s, BlochState(0, 0, 0), eps, cfg);
      REQUIRE(t.has_value());
      CHECK(*t <= prev);
      prev = *t;
    }
  }
}

TEST_CASE("first_hit bisects to full precision") {
  const auto ch = phase_damping(1.0);
  IntegratorConfig cfg;
  cfg.t_max = 10.0;
  const auto s = BlochState(0.8, 0.0, 0.1);
  auto hit = first_hit(ch, zero_field(), s, [](double, const Vec3& r) { return r.x() - 0.2; }, cfg);
  REQUIRE(hit.time.has_value());
  CHECK(*hit.time == Approx(std::log(4.0) / 2.0).epsilon(1e-10));
  CHECK(hit.trajectory.reason() == TerminalReason::ball_hit);
  CHECK(hit.trajectory.t_end() == Approx(*hit.time).epsilon(1e-15));
  CHECK(std::abs(hit.trajectory.final_state().x() - 0.2) < 1e-10);
}

TEST_CASE("stall control") {
  const double gamma = kE2 - 1;
  const analytic::AdParams p{gamma, 2.0};
  const auto ad = amplitude_damping(gamma, 2.0);
  IntegratorConfig cfg;
  cfg.t_max = 10.0 / gamma;
  for (int i = 0; i < 10; ++i) {
    const double r = test_support::uniform(0.05, p.r_fp() - 0.01);
    const double th = analytic::theta_stall(r, p);
    const auto s = from_spherical({r, th, test_support::uniform(-pi, pi)});
    const Vec3 h = stall_control(ad, s);
    CHECK((2.0 * h.cross(s.vec()) + dissipator_velocity(ad, s)).norm() < 1e-10);
    CHECK(std::abs(h.dot(s.vec())) < 1e-12);
    const auto traj = evolve(ad, constant_field(h), s, cfg);
    for (int k = 0; k <= 50; ++k) {
      CHECK((traj.at(traj.t_end() * k / 50.0).vec() - s.vec()).norm() < 1e-8);
    }
  }
  CHECK(stall_control(ad, BlochState(0, 0, -p.r_fp())).norm() < 1e-12);
  CHECK_THROWS_AS(stall_control(ad, BlochState(0.3, 0.0, 0.3)), DomainError);
  CHECK_THROWS_AS(stall_control(depolarizing(0.1, 0.2, 0.3), BlochState(0.1, 0.2, 0.0)),
                  DomainError);
}

TEST_CASE("rotate-decay-rotate lands in the ball") {
  const double gamma = kE2 - 1;
  const analytic::AdParams p{gamma, 2.0};
  const auto ad = amplitude_damping(gamma, 2.0);
  const auto center = BlochState(0, 0, -p.r_fp());
  IntegratorConfig cfg;
  cfg.t_max = 10.0;
  for (int i = 0; i < 20; ++i) {
    const auto s = random_state();
    const double eps = 0.04;
    const auto res =
        rotate_decay_rotate(ad, s, analytic::fast_direction_ad(s, eps, p), center, eps, cfg);
    REQUIRE(res.time.has_value());
    CHECK(*res.time == Approx(analytic::t_fast_ad(s, eps, p)).epsilon(1e-6));
    CHECK(trace_distance(res.final_state, center) * 2.0 <= eps + 1e-9);
  }
}
