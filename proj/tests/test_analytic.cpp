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
#include <limits>
#include <numbers>

#include "bloch_relax/analytic.hpp"
#include "bloch_relax/dynamics.hpp"
#include "bloch_relax/errors.hpp"
#include "bloch_relax/weak_field.hpp"
#include "support.hpp"

using namespace bloch_relax;
using namespace bloch_relax::analytic;
using doctest::Approx;
using std::numbers::pi;
using test_support::random_state;
using test_support::uniform;

namespace {

const double kE2 = std::exp(2.0);
const AdParams kRef{kE2 - 1, 2.0};

}  // namespace

TEST_CASE("free amplitude damping time") {
  const double rfp = kRef.r_fp();
  CHECK(t_free_ad(BlochState(0, 0, -rfp + 0.04), 0.04, kRef) == 0.0);
  CHECK(t_free_ad(BlochState(0, 0, -rfp), 0.04, kRef) == 0.0);

  // Equatorial pure state: 2 (r_fp/gamma)|ln eps| as eps -> 0.
  for (double eps : {1e-4, 1e-6, 1e-8}) {
    const double t = t_free_ad(BlochState(1, 0, 0), eps, kRef);
    CHECK(t == Approx(2 * rfp / kRef.gamma * std::abs(std::log(eps))).epsilon(1e-6));
  }

  // Reference initial state, cross-checked against the integrated hitting time.
  const auto s = BlochState(0.38, -0.22, -0.46);
  const double t = t_free_ad(s, 0.04, kRef);
  CHECK(t == Approx(0.5716426356).epsilon(1e-9));
  IntegratorConfig cfg;
  cfg.t_max = 5.0;
  const auto hit = time_to_ball(amplitude_damping(kRef.gamma, kRef.beta), zero_field(), s,
                                BlochState(0, 0, -rfp), 0.04, cfg);
  REQUIRE(hit.has_value());
  CHECK(*hit == Approx(t).epsilon(1e-8));

  CHECK_THROWS_AS(t_free_ad(s, 0.0, kRef), DomainError);
  CHECK_THROWS_AS(t_free_ad(s, 0.1, AdParams{1.0, 0.0}), DomainError);
}

TEST_CASE("on-axis free time uses the z equation") {
  const double rfp = kRef.r_fp();
  for (double z : {0.9, 0.3, -0.1, -0.5, -0.95}) {
    const auto s = BlochState(0, 0, z);
    const double eps = 0.01;
    if (std::abs(z + rfp) <= eps) continue;
    CHECK(t_free_ad(s, eps, kRef) ==
          Approx(rfp / kRef.gamma * std::log(std::abs(z + rfp) / eps)).epsilon(1e-13));
    // Continuity with a slightly off-axis state.
    CHECK(t_free_ad(BlochState(1e-9, 0, z), eps, kRef) ==
          Approx(t_free_ad(s, eps, kRef)).epsilon(1e-8));
  }
}

TEST_CASE("amplitude damping purity speeds") {
  const double rfp = kRef.r_fp();
  CHECK(std::abs(v_ad(rfp, pi, kRef)) < 1e-14);
  for (double r : {0.1, 0.5, 0.9}) {
    CHECK(v_cool(r, kRef) == Approx(kRef.gamma * r * (1 - r / rfp)));
    CHECK(v_heat(r, kRef) == Approx(-kRef.gamma * r * (1 + r / rfp)));
    CHECK(v_ad(r, pi, kRef) == Approx(v_cool(r, kRef)));
    CHECK(v_ad(r, 0.0, kRef) == Approx(v_heat(r, kRef)));
    // theta = 0 is the global minimum over theta.
    for (int k = 1; k <= 100; ++k) CHECK(v_ad(r, pi * k / 100.0, kRef) >= v_ad(r, 0.0, kRef));
  }
  // Stationary angle arccos(-r_fp/r) for r > r_fp.
  for (double r : {0.8, 0.9, 1.0}) {
    const double th = std::acos(-rfp / r);
    const double h = 1e-6;
    const double dv = (v_ad(r, th + h, kRef) - v_ad(r, th - h, kRef)) / (2 * h);
    CHECK(std::abs(dv) < 1e-7);
  }
}

TEST_CASE("optimal amplitude damping time") {
  const double rfp = kRef.r_fp(), g = kRef.gamma, eps = 0.04;
  CHECK(t_fast_ad(BlochState(0, 0, 0), eps, kRef) == Approx(rfp / g * std::log(rfp / eps)));
  CHECK(t_fast_ad(BlochState(0.3, 0.0, 0.0), eps, kRef) ==
        Approx(rfp / g * std::log((rfp - 0.3) / eps)));
  CHECK(t_fast_ad(BlochState(0, rfp + 0.03, 0), eps, kRef) == 0.0);
  CHECK(t_fast_ad(BlochState(0, 0, rfp - 0.04), eps, kRef) == 0.0);
  CHECK(t_fast_ad(BlochState(0, 0, 1.0), eps, kRef) ==
        Approx(rfp / g * std::log((rfp + 1) / (2 * rfp + eps))));
  CHECK(t_fast_ad(BlochState(1, 0, 0), 1e-12, kRef) ==
        Approx(rfp / g * std::log((rfp + 1) / (2 * rfp))).epsilon(1e-10));
  CHECK(t_fast_ad(BlochState(0.38, -0.22, -0.46), eps, kRef) == Approx(0.1364607685).epsilon(1e-9));

  CHECK(ad_regime(0.2, eps, kRef) == AdRegime::cooling);
  CHECK(ad_regime(rfp, eps, kRef) == AdRegime::within);
  CHECK(ad_regime(0.95, eps, kRef) == AdRegime::heating);
  CHECK((fast_direction_ad(BlochState(0.2, 0, 0), eps, kRef) - Vec3(0, 0, -1)).norm() == 0.0);
  CHECK((fast_direction_ad(BlochState(0.95, 0, 0), eps, kRef) - Vec3(0, 0, 1)).norm() == 0.0);
}

TEST_CASE("property: control never slows relaxation") {
  for (int i = 0; i < 500; ++i) {
    const AdParams p{uniform(0.1, 5.0), uniform(0.1, 4.0)};
    const auto s = random_state();
    const double eps = uniform(1e-4, 0.2);
    CHECK(t_fast_ad(s, eps, p) <= t_free_ad(s, eps, p) + 1e-12);
  }
  for (int i = 0; i < 500; ++i) {
    const Depolarizing d{uniform(0, 1), uniform(0, 1), uniform(0.05, 1)};
    const auto s = random_state();
    const double eps = uniform(1e-4, 0.2);
    CHECK(t_fast_dp(s, eps, d) <= t_free_dp(s, eps, d) * (1 + 1e-12));
  }
}

TEST_CASE("property: on-axis cooling gains nothing") {
  for (int i = 0; i < 50; ++i) {
    const AdParams p{uniform(0.1, 5.0), uniform(0.2, 4.0)};
    const double eps = 1e-3;
    const double z = uniform(0.0, p.r_fp() - 2 * eps);
    const auto s = BlochState(0, 0, -z);
    CHECK(std::abs(t_fast_ad(s, eps, p) - t_free_ad(s, eps, p)) < 1e-9);
  }
}

TEST_CASE("leading-order worst cases") {
  const auto w = worst_case_times_ad(0.04, kRef);
  CHECK(w.t_fast_max == Approx(0.3837).epsilon(2e-4));
  CHECK(w.t_free_max == Approx(2 * w.t_fast_max));
  CHECK(w.ratio() == Approx(2.0));
  const auto one = worst_case_times_ad(1.0, kRef);
  CHECK(one.t_fast_max == 0.0);
  CHECK(one.t_free_max == 0.0);

  const Depolarizing d{0.5, 1.5, 2.5};  // Gamma = (4, 3, 2)
  const auto wd = worst_case_times_dp(1e-3, d);
  CHECK(wd.ratio() == Approx(2.0));
  CHECK(wd.t_fast_max == Approx(std::abs(std::log(1e-3)) / 8.0));
  const auto wp = worst_case_times_pd(1e-2, 0.5);
  CHECK(wp.t_fast_max == Approx(std::abs(std::log(1e-2))));
  CHECK(wp.t_free_max == wp.t_fast_max);
}

TEST_CASE("grid worst case over the ball") {
  const auto g = grid_worst_case_ad(0.04, kRef, 41, 2);
  CHECK(g.fast.value == Approx(t_fast_ad(BlochState(0, 0, 0), 0.04, kRef)).epsilon(1e-12));
  CHECK(g.free.value >= t_free_ad(BlochState(1, 0, 0), 0.04, kRef) - 1e-12);
  CHECK(g.free.argmax.norm() <= 1.0 + 1e-12);
  // Same answer for any worker count.
  const auto g1 = grid_worst_case_ad(0.04, kRef, 41, 1);
  CHECK(g1.free.value == g.free.value);
  CHECK(g1.free.argmax == g.free.argmax);

  const auto d = grid_worst_case_dp(0.01, Depolarizing{1, 2, 5}, 17, 2);
  CHECK(d.free.value > d.fast.value);
}

TEST_CASE("stall angle") {
  const double rfp = kRef.r_fp();
  CHECK(theta_stall(rfp, kRef) == Approx(pi));
  CHECK(theta_stall(1e-7, kRef) == Approx(pi / 2).epsilon(1e-6));
  for (int i = 0; i < 200; ++i) {
    const double r = uniform(1e-3, rfp);
    CHECK(std::abs(v_ad(r, theta_stall(r, kRef), kRef)) < 1e-12);
  }
  CHECK_THROWS_AS(theta_stall(rfp + 0.01, kRef), DomainError);
  CHECK_THROWS_AS(theta_stall(0.0, kRef), DomainError);
}

TEST_CASE("spherical equations agree with the Cartesian flow") {
  for (int i = 0; i < 500; ++i) {
    const AdParams p{uniform(0.2, 4.0), uniform(0.2, 3.0)};
    const auto ch = amplitude_damping(p.gamma, p.beta);
    const SphericalCoords c{uniform(0.05, 1.0), uniform(0.05, pi - 0.05), uniform(-pi, pi)};
    const Vec3 h = uniform(0, 2) * test_support::random_direction();
    const auto rates = spherical_rhs_ad(c, h, p);
    const Vec3 v = bloch_rhs(ch, h, from_spherical(c).vec());
    const auto f = spherical_frame(c.theta, c.phi);
    CHECK(rates.r_dot == Approx(v.dot(f.e_r)).epsilon(1e-10).scale(1));
    CHECK(rates.theta_dot * c.r == Approx(v.dot(f.e_theta)).epsilon(1e-10).scale(1));
    CHECK(rates.phi_dot * c.r * std::sin(c.theta) == Approx(v.dot(f.e_phi)).epsilon(1e-10).scale(1));
    CHECK(rates.phi_defined);
  }
}

TEST_CASE("spherical equation examples") {
  const double rfp = kRef.r_fp();
  const auto pole = spherical_rhs_ad({0.4, pi, 0.0}, Vec3::Zero(), kRef);
  CHECK(std::abs(pole.theta_dot) < 1e-14);
  CHECK(pole.r_dot == Approx(v_cool(0.4, kRef) / 0.4));
  CHECK_FALSE(pole.phi_defined);
  CHECK(std::isnan(pole.phi_dot));

  for (int i = 0; i < 200; ++i) {
    const SphericalCoords c{uniform(0.01, rfp), uniform(1e-3, pi - 1e-3), uniform(-pi, pi)};
    CHECK(spherical_rhs_ad(c, Vec3::Zero(), kRef).theta_dot > 0.0);
    const auto free = spherical_rhs_ad(c, Vec3::Zero(), kRef);
    const auto z = spherical_rhs_ad(c, Vec3(0, 0, 0.7), kRef);
    CHECK(z.phi_dot == Approx(free.phi_dot + 1.4));
    CHECK(z.theta_dot == Approx(free.theta_dot));
  }
  CHECK_THROWS_AS(spherical_rhs_ad({0.0, 1.0, 0.0}, Vec3::Zero(), kRef), DomainError);
}

TEST_CASE("depolarizing free time") {
  const Depolarizing iso{0.3, 0.3, 0.3};
  for (int i = 0; i < 100; ++i) {
    const auto s = random_state(0.05, 1.0);
    CHECK(t_free_dp(s, 0.05, iso) == Approx(std::log(s.norm() / 0.05) / (4 * 0.3)).epsilon(1e-12));
  }
  const Depolarizing d{0.1, 0.4, 0.7};
  CHECK(t_free_dp(BlochState(0.8, 0, 0), 0.02, d) ==
        Approx(std::log(0.8 / 0.02) / (2 * d.big_gamma_x())).epsilon(1e-12));
  CHECK(t_free_dp(BlochState(0, 0.02, 0), 0.02, d) == 0.0);
  for (int i = 0; i < 200; ++i) {
    const auto s = random_state(0.1, 1.0);
    const double t = t_free_dp(s, 0.03, d);
    CHECK(closed_form_dp(s, t, d.gx, d.gy, d.gz).norm() == Approx(0.03).epsilon(1e-12));
  }
  // A conserved component larger than eps keeps the state out forever.
  const Depolarizing zonly{0, 0, 1};
  CHECK(std::isinf(t_free_dp(BlochState(0.3, 0, 0.5), 0.1, zonly)));
  CHECK(std::isfinite(t_free_dp(BlochState(0.5, 0, 0.05), 0.1, zonly)));
}

TEST_CASE("depolarizing optimal time and speeds") {
  const Depolarizing iso{0.3, 0.3, 0.3};
  for (int i = 0; i < 50; ++i) {
    const auto s = random_state(0.05, 1.0);
    CHECK(t_fast_dp(s, 0.05, iso) == Approx(t_free_dp(s, 0.05, iso)).epsilon(1e-12));
  }
  CHECK(dp_control_useless(iso));
  CHECK_FALSE(dp_control_useless(Depolarizing{0.1, 0.3, 0.3}));
  CHECK(t_fast_dp(BlochState(0.04, 0, 0), 0.04, iso) == 0.0);

  // |v| is largest on the axis of the smallest gamma.
  const Depolarizing d{0.9, 0.2, 0.5};
  CHECK((fast_direction_dp(d) - Vec3(0, 1, 0)).norm() == 0.0);
  const double best = std::abs(v_dp(0.7, pi / 2, pi / 2, d));
  for (int i = 0; i < 200; ++i) {
    CHECK(std::abs(v_dp(0.7, uniform(0, pi), uniform(-pi, pi), d)) <= best + 1e-14);
  }
  for (int i = 0; i < 100; ++i) {
    const auto s = random_state();
    const auto c = to_spherical(s);
    CHECK(v_dp(c.r, c.theta, c.phi, d) ==
          Approx(purity_speed(depolarizing(d.gx, d.gy, d.gz), s)).epsilon(1e-12).scale(1e-3));
  }
}

TEST_CASE("phase damping times") {
  const double g = 0.5;
  const auto eq = BlochState(0.6, 0.3, 0.0);
  CHECK(t_fast_pd(eq, 0.01, g) == Approx(t_free_pd(eq, 0.01, g)));
  CHECK(t_free_pd(eq, 0.01, g) == Approx(std::log(eq.norm() / 0.01) / (2 * g)));
  CHECK(t_free_pd(BlochState(0, 0, 0.7), 0.01, g) == 0.0);
  CHECK(t_fast_pd(BlochState(0, 0, 0.7), 0.01, g) == 0.0);
  const auto s = BlochState(0.5, -0.2, 0.4);
  CHECK(t_fast_pd(s, 0.01, g) == Approx(std::log(s.norm() / 0.41) / (2 * g)));
  CHECK((natural_fixed_point_pd(s) - Vec3(0, 0, 0.4)).norm() == 0.0);
  for (int i = 0; i < 200; ++i) {
    const auto r = random_state();
    CHECK(t_free_pd(r, 0.01, g) <= worst_case_times_pd(0.01, g).t_free_max + 1e-12);
    CHECK(t_fast_pd(r, 0.01, g) <= worst_case_times_pd(0.01, g).t_fast_max + 1e-12);
  }
}

TEST_CASE("channel dispatch of closed forms") {
  const auto s = BlochState(0.3, 0.2, -0.1);
  CHECK(analytic_fast_time(amplitude_damping(kRef.gamma, kRef.beta), s, 0.04) ==
        t_fast_ad(s, 0.04, kRef));
  CHECK(analytic_free_time(phase_damping(0.3), s, 0.04) == t_free_pd(s, 0.04, 0.3));
  CHECK(analytic_free_time(depolarizing(0.1, 0.2, 0.3), s, 0.04) ==
        t_free_dp(s, 0.04, Depolarizing{0.1, 0.2, 0.3}));
  CHECK(std::isnan(analytic_fast_time(test_support::random_generic_channel(2), s, 0.04)));
}

TEST_CASE("weak-field expansion") {
  const auto s = BlochState(0.38, -0.22, -0.46);
  CrabControl c;
  c.omega = 1.0;
  c.coeffs.assign(c.dimension(), 0.0);
  for (std::size_t k = 0; k < c.coeffs.size(); ++k) c.coeffs[k] = std::sin(1.0 + k);
  const auto rep = weak_field_report(s, 0.04, kRef, c);
  CHECK(rep.T_bar == Approx(rep.hitting_time).epsilon(1e-9));
  CHECK(rep.A_bound > 0.0);
  CHECK(std::abs(rep.A) <= rep.A_bound + 1e-9);
  CHECK(rep.theta_bar > rep.theta_i);
  CHECK(rep.bound_hypothesis == (rep.T_bar <= c.tau / (2.0 * c.n_modes)));

  // Only z coefficients: the transverse driving term vanishes.
  CrabControl z = c;
  for (std::size_t k = 0; k < z.coeffs.size(); ++k)
    if (k % 3 != 2) z.coeffs[k] = 0.0;
  const auto rz = weak_field_report(s, 0.04, kRef, z);
  CHECK(rz.gamma_integral == 0.0);
  CHECK(rz.A == 0.0);
  CHECK(rz.T_bar == Approx(rep.T_bar).epsilon(1e-12));

  // With r_fp < 1/2 a state near the south pole first drifts away from it.
  CHECK_THROWS_AS(weak_field_report(BlochState(0.05, 0.0, -0.95), 0.04, AdParams{1.0, 0.5}, c),
                  DomainError);
  // Already inside the ball.
  CHECK_THROWS_AS(weak_field_report(BlochState(0, 0, -kRef.r_fp()), 0.04, kRef, c), DomainError);
}
