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

#include "bloch_relax/weak_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bloch_relax/dynamics.hpp"
#include "bloch_relax/errors.hpp"

namespace bloch_relax::analytic {

namespace {

constexpr int kMonotoneChecks = 8;
constexpr double kSingularD = 1e-6;
constexpr double kQuadTol = 1e-11;

template <class F>
double integrate(const F& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  return Rule::integrate(f, a, b, 20, kQuadTol);
}

}  // namespace

WeakFieldReport weak_field_report(const BlochState& s0, double eps, const AdParams& p,
                                  const CrabControl& control, const IntegratorConfig& cfg_in) {
  p.validate();
  control.validate();
  if (!std::isfinite(eps) || eps <= 0.0) {
    throw DomainError("ball radius eps must be positive");
  }
  const double rfp = p.r_fp();
  const auto ch = amplitude_damping(p.gamma, p.beta);
  CrabControl drift = control;
  drift.m = 0.0;
  IntegratorConfig cfg = cfg_in;
  cfg.t_max = control.tau;

  const Vec3 fp(0.0, 0.0, -rfp);
  const auto hit = first_hit(ch, make_field(drift), s0,
                             [&](double, const Vec3& r) { return (r - fp).norm() - eps; }, cfg);
  if (!hit.time) {
    throw DomainError("uncontrolled trajectory does not reach the eps-ball within tau");
  }
  if (*hit.time <= 0.0) {
    throw DomainError("initial state is already within eps of the fixed point");
  }
  const auto& traj = hit.trajectory;
  const double T = *hit.time;

  auto coords = [&](double t) { return to_spherical(traj.at(t)); };
  auto theta_dot0 = [&](double t) {
    return spherical_rhs_ad(coords(t), drift_field(control, t), p).theta_dot;
  };

  std::vector<double> ts;
  std::vector<double> thetas;
  for (const auto& s : traj.samples()) {
    ts.push_back(s.t);
    thetas.push_back(to_spherical(s.state).theta);
  }
  auto non_monotone = [] {
    return DomainError(
        "polar angle is not monotone along the uncontrolled trajectory; the weak-field "
        "expansion only applies to cooling, or to heating close to the fixed point");
  };
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(theta_dot0(ts[i]) > 0.0)) throw non_monotone();
    if (i == 0) continue;
    if (!(thetas[i] > thetas[i - 1])) throw non_monotone();
    for (int j = 1; j < kMonotoneChecks; ++j) {
      const double t = ts[i - 1] + (ts[i] - ts[i - 1]) * j / kMonotoneChecks;
      if (!(theta_dot0(t) > 0.0)) throw non_monotone();
    }
  }

  // Inverse of the monotone map t -> theta by bisection on the dense output.
  auto time_at = [&](double theta) {
    const auto it = std::upper_bound(thetas.begin(), thetas.end(), theta);
    if (it == thetas.begin()) return 0.0;
    if (it == thetas.end()) return T;
    const auto k = static_cast<std::size_t>(it - thetas.begin());
    double lo = ts[k - 1], hi = ts[k];
    for (int i = 0; i < 200; ++i) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      (coords(mid).theta < theta ? lo : hi) = mid;
    }
    return lo + 0.5 * (hi - lo);
  };

  const double theta_i = thetas.front();
  const double theta_bar = thetas.back();
  const double two_pi_over_tau = 2.0 * std::numbers::pi / control.tau;

  WeakFieldReport out;
  out.theta_i = theta_i;
  out.theta_bar = theta_bar;
  out.hitting_time = T;
  out.T_bar = integrate([&](double th) { return 1.0 / theta_dot0(time_at(th)); }, theta_i,
                        theta_bar);
  out.gamma_integral = integrate(
      [&](double th) {
        const double t = time_at(th);
        const auto c = coords(t);
        const Vec3 hc = control_shape(control, t);
        const double g = 2.0 * (-hc.x() * std::sin(c.phi) + hc.y() * std::cos(c.phi));
        const double v = theta_dot0(t);
        return g / (v * v);
      },
      theta_i, theta_bar);
  const double bound_integral = integrate(
      [&](double th) {
        const double t = time_at(th);
        const auto c = coords(t);
        double modes = 0.0;
        for (int n = 1; n <= control.n_modes; ++n) {
          modes += std::abs(std::sin(two_pi_over_tau * n * t));
        }
        const double v = theta_dot0(t);
        return t * (std::abs(std::sin(c.phi)) + std::abs(std::cos(c.phi))) * modes / (v * v);
      },
      theta_i, theta_bar);

  const auto end = coords(T);
  const auto rates = spherical_rhs_ad(end, drift_field(control, T), p);
  out.r_bar = end.r;
  out.D = rates.r_dot * (end.r + rfp * std::cos(end.theta)) /
          (rates.theta_dot * end.r * rfp * std::sin(end.theta));
  if (std::abs(1.0 - out.D) < kSingularD) {
    throw DomainError("weak-field slope is singular at this endpoint (D = 1)");
  }
  out.A = out.gamma_integral / (1.0 - out.D);
  out.A_bound = 2.0 * bound_integral / (control.n_modes * control.tau * (1.0 - out.D));
  out.bound_hypothesis = out.T_bar <= control.tau / (2.0 * control.n_modes);
  return out;
}

}  // namespace bloch_relax::analytic
