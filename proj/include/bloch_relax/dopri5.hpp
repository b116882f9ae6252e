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

#pragma once

// Dormand-Prince 5(4) with the Hairer/Wanner fourth-order continuous
// extension and PI step-size control, specialised to the 3-dim Bloch flow.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bloch_relax/bloch.hpp"
#include "bloch_relax/errors.hpp"

namespace bloch_relax {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double t_max = 1.0;
  long max_steps = 2'000'000;

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

inline void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw DomainError("integrator tolerances must be positive");
  }
  if (!(max_step > 0.0)) {
    throw DomainError("integrator max_step must be positive");
  }
  if (!std::isfinite(t_max) || t_max < 0.0) {
    throw DomainError("integration horizon must be finite and non-negative");
  }
}

/// Continuous extension over one accepted step [t0, t0 + h].
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  Vec3 c0, c1, c2, c3, c4;

  double t1() const { return t0 + h; }
  Vec3 at(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return c0 + s * (c1 + s1 * (c2 + s * (c3 + s1 * c4)));
  }
  Vec3 start() const { return c0; }
  Vec3 end() const { return c0 + c1; }
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
  bool stopped_early = false;
};

namespace detail {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

inline double error_norm(const Vec3& err, const Vec3& y0, const Vec3& y1, double atol,
                         double rtol) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    acc += (err(i) / sk) * (err(i) / sk);
  }
  return std::sqrt(acc / 3.0);
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t1 (either direction). Every accepted
/// step is handed to `on_step(const DenseStep&)`; returning false stops the
/// integration after that step. Throws NumericalError on step-size underflow.
template <class Rhs, class OnStep>
IntegrationStats integrate_dopri5(Rhs&& rhs, double t0, const Vec3& y0, double t1,
                                  const IntegratorConfig& cfg, OnStep&& on_step) {
  using namespace detail;
  IntegrationStats stats;
  if (t1 == t0) return stats;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  const double hmax = std::min(cfg.max_step, span);
  const double atol = cfg.abs_tol, rtol = cfg.rel_tol;

  double t = t0;
  Vec3 y = y0;
  Vec3 k1 = rhs(t, y);
  ++stats.rhs_evals;

  // Initial step guess (Hairer, Norsett, Wanner: HINIT).
  double h;
  {
    const Vec3 sk = (atol + rtol * y.cwiseAbs().array()).matrix();
    const double dnf = (k1.array() / sk.array()).square().sum() / 3.0;
    const double dny = (y.array() / sk.array()).square().sum() / 3.0;
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax);
    const Vec3 y1 = y + dir * h * k1;
    const Vec3 f1 = rhs(t + dir * h, y1);
    ++stats.rhs_evals;
    const double der2 = std::sqrt(((f1 - k1).array() / sk.array()).square().sum() / 3.0) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                     : std::pow(0.01 / der12, 1.0 / 5.0);
    h = std::min({100.0 * h, h1, hmax});
  }

  constexpr double safe = 0.9, facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0, beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  double facold = 1e-4;
  bool last_rejected = false;
  long steps = 0;

  while (dir * (t1 - t) > 0.0) {
    if (++steps > cfg.max_steps) {
      throw NumericalError("integrator exceeded the maximum number of steps");
    }
    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    if (h < 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t << " (h = " << h << ")";
      throw NumericalError(msg.str());
    }
    const double hs = dir * h;
    const Vec3 k2 = rhs(t + c2 * hs, y + hs * a21 * k1);
    const Vec3 k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    const Vec3 k4 = rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec3 k5 = rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec3 ystiff = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const double tph = last ? t1 : t + hs;
    const Vec3 k6 = rhs(tph, ystiff);
    const Vec3 ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Vec3 k7 = rhs(tph, ynew);
    stats.rhs_evals += 6;

    const Vec3 err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, ynew, atol, rtol);
    if (!std::isfinite(en)) {
      throw NumericalError("non-finite local error estimate");
    }
    const double fac11 = std::pow(en, expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(facc2, std::min(facc1, fac / safe));
    double hnew = h / fac;

    if (en <= 1.0) {
      facold = std::max(en, 1e-4);
      ++stats.accepted;
      DenseStep step;
      step.t0 = t;
      step.h = tph - t;
      const Vec3 ydiff = ynew - y;
      const Vec3 bspl = hs * k1 - ydiff;
      step.c0 = y;
      step.c1 = ydiff;
      step.c2 = bspl;
      step.c3 = ydiff - hs * k7 - bspl;
      step.c4 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      k1 = k7;
      y = ynew;
      t = tph;
      if (!on_step(static_cast<const DenseStep&>(step))) {
        stats.stopped_early = true;
        return stats;
      }
      if (last) break;
      hnew = std::min(hnew, hmax);
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
    } else {
      hnew = h / std::min(facc1, fac11 / safe);
      last_rejected = true;
      ++stats.rejected;
    }
    h = hnew;
  }
  return stats;
}

}  // namespace bloch_relax
