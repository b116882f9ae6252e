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

#include "bloch_relax/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "bloch_relax/errors.hpp"
#include "bloch_relax/parallel.hpp"

namespace bloch_relax::analytic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRefineRounds = 2;
// States this close to the ball boundary (relative to eps) count as inside.
constexpr double kBoundarySlack = 4.0 * std::numeric_limits<double>::epsilon();
// |sin theta| below this is treated as on the z-axis.
constexpr double kPoleTol = 1e-12;

void require_eps(double eps) {
  if (!std::isfinite(eps) || eps <= 0.0) {
    throw DomainError("ball radius eps must be positive and finite");
  }
}

void require_rate(double r, const char* what) {
  if (!std::isfinite(r) || r <= 0.0) {
    throw DomainError(std::string(what) + " must be positive");
  }
}

struct PairMax {
  GridMaximum fast{-kInf, Vec3::Zero()};
  GridMaximum free{-kInf, Vec3::Zero()};
};

void take(GridMaximum& best, double value, const Vec3& at) {
  if (value > best.value) {
    best.value = value;
    best.argmax = at;
  }
}

template <class Fast, class Free>
PairMax scan(const std::vector<Vec3>& pts, const Fast& fast, const Free& free, int jobs) {
  std::vector<PairMax> local(chunk_count(pts.size(), jobs));
  parallel_chunks(pts.size(), jobs, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& best = local[c];
    for (std::size_t i = begin; i < end; ++i) {
      const BlochState s(pts[i]);
      take(best.fast, fast(s), pts[i]);
      take(best.free, free(s), pts[i]);
    }
  });
  PairMax out;
  for (const auto& l : local) {
    take(out.fast, l.fast.value, l.fast.argmax);
    take(out.free, l.free.value, l.free.argmax);
  }
  return out;
}

// Snap points that rounding pushed just outside the unit sphere back onto it.
bool admit(Vec3 p, std::vector<Vec3>& out) {
  const double n = p.norm();
  if (n > 1.0 + 1e-12) return false;
  if (n > 1.0) p /= n;
  out.push_back(p);
  return true;
}

double axis_value(int i, int resolution) {
  return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(resolution - 1);
}

// Local refinement: a (2k+1)^dim sub-grid of half-width `width` around the
// current maximiser, shrinking tenfold per round.
template <class F>
GridMaximum refine(GridMaximum best, const F& f, double width, bool three_d, int jobs) {
  const int k = three_d ? 5 : 10;
  for (int round = 0; round < kRefineRounds; ++round) {
    std::vector<Vec3> pts;
    const Vec3 c = best.argmax;
    for (int i = -k; i <= k; ++i) {
      for (int j = -k; j <= k; ++j) {
        if (three_d) {
          for (int l = -k; l <= k; ++l) {
            admit(c + width / k * Vec3(i, j, l), pts);
          }
        } else {
          admit(c + width / k * Vec3(i, 0, j), pts);
        }
      }
    }
    const auto found = scan(pts, f, f, jobs).fast;
    take(best, found.value, found.argmax);
    width /= k;
  }
  return best;
}

template <class Fast, class Free>
GridWorstCase grid_search(const std::vector<Vec3>& pts, const Fast& fast, const Free& free,
                          int resolution, bool three_d, int jobs) {
  const auto coarse = scan(pts, fast, free, jobs);
  const double spacing = 2.0 / (resolution - 1);
  GridWorstCase out;
  out.fast = refine(coarse.fast, fast, spacing, three_d, jobs);
  out.free = refine(coarse.free, free, spacing, three_d, jobs);
  return out;
}

void require_resolution(int resolution) {
  if (resolution < 3) {
    throw DomainError("grid resolution must be at least 3 points per axis");
  }
}

}  // namespace

void AdParams::validate() const {
  require_rate(gamma, "amplitude damping gamma");
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw DomainError("amplitude damping needs beta > 0");
  }
}

// ---------------------------------------------------------------------------

double t_free_ad(const BlochState& s0, double eps, const AdParams& p) {
  p.validate();
  require_eps(eps);
  const double rfp = p.r_fp();
  const double rho2 = s0.x() * s0.x() + s0.y() * s0.y();
  const double zs = s0.z() + rfp;
  if (std::sqrt(rho2 + zs * zs) <= eps * (1.0 + kBoundarySlack)) return 0.0;
  const double scale = rfp / p.gamma;
  if (rho2 == 0.0) {
    return std::max(0.0, scale * std::log(std::abs(zs) / eps));
  }
  // Distance^2 = u rho^2 + u^2 Z^2 with u = exp(-gamma t / r_fp); take the
  // positive root of the quadratic in u.
  const double disc = std::sqrt(rho2 * rho2 + 4.0 * zs * zs * eps * eps);
  return std::max(0.0, scale * std::log((rho2 + disc) / (2.0 * eps * eps)));
}

double v_ad(double r, double theta, const AdParams& p) {
  p.validate();
  const double rfp = p.r_fp();
  const double c = std::cos(theta);
  return -(p.gamma / (2.0 * rfp)) * r * (r * (1.0 + c * c) + 2.0 * rfp * c);
}

double v_cool(double r, const AdParams& p) {
  p.validate();
  return p.gamma * r * (1.0 - r / p.r_fp());
}

double v_heat(double r, const AdParams& p) {
  p.validate();
  return -p.gamma * r * (1.0 + r / p.r_fp());
}

AdRegime ad_regime(double r_i, double eps, const AdParams& p) {
  const double rfp = p.r_fp();
  if (r_i < rfp - eps) return AdRegime::cooling;
  if (r_i > rfp + eps) return AdRegime::heating;
  return AdRegime::within;
}

double t_fast_ad(const BlochState& s0, double eps, const AdParams& p) {
  p.validate();
  require_eps(eps);
  const double rfp = p.r_fp();
  const double ri = s0.norm();
  const double scale = rfp / p.gamma;
  switch (ad_regime(ri, eps, p)) {
    case AdRegime::cooling:
      return scale * std::log((rfp - ri) / eps);
    case AdRegime::heating:
      return scale * std::log((rfp + ri) / (2.0 * rfp + eps));
    case AdRegime::within:
      break;
  }
  return 0.0;
}

Vec3 fast_direction_ad(const BlochState& s0, double eps, const AdParams& p) {
  switch (ad_regime(s0.norm(), eps, p)) {
    case AdRegime::cooling:
      return Vec3(0.0, 0.0, -1.0);
    case AdRegime::heating:
      return Vec3(0.0, 0.0, 1.0);
    case AdRegime::within:
      break;
  }
  return s0.norm() > 0.0 ? Vec3(s0.vec() / s0.norm()) : Vec3(0.0, 0.0, -1.0);
}

double theta_stall(double r_i, const AdParams& p) {
  p.validate();
  const double rfp = p.r_fp();
  if (!(r_i > 0.0) || r_i > rfp) {
    throw DomainError("no stall angle: radius must lie in (0, r_fp]");
  }
  const double q = r_i / rfp;
  const double arg = (std::sqrt(std::max(0.0, 1.0 - q * q)) - 1.0) / q;
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

SphericalRates spherical_rhs_ad(const SphericalCoords& c, const Vec3& h, const AdParams& p) {
  p.validate();
  if (!(c.r > 0.0)) {
    throw DomainError("spherical equations are singular at r = 0");
  }
  const double rfp = p.r_fp();
  const double k = p.gamma / (2.0 * rfp);
  const double st = std::sin(c.theta), ct = std::cos(c.theta);
  const double sp = std::sin(c.phi), cp = std::cos(c.phi);
  SphericalRates out;
  out.r_dot = -k * (c.r * (1.0 + ct * ct) + 2.0 * rfp * ct);
  out.theta_dot = st * (k * c.r * ct + p.gamma) / c.r + 2.0 * (-h.x() * sp + h.y() * cp);
  if (std::abs(st) < kPoleTol) {
    out.phi_defined = false;
    out.phi_dot = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.phi_dot = -2.0 * ((h.x() * cp + h.y() * sp) * ct / st - h.z());
  }
  return out;
}

WorstCase worst_case_times_ad(double eps, const AdParams& p) {
  p.validate();
  require_eps(eps);
  const double l = eps < 1.0 ? -std::log(eps) : 0.0;
  const double scale = p.r_fp() / p.gamma;
  return {scale * l, 2.0 * scale * l};
}

GridWorstCase grid_worst_case_ad(double eps, const AdParams& p, int resolution, int jobs) {
  p.validate();
  require_eps(eps);
  require_resolution(resolution);
  std::vector<Vec3> pts;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      admit(Vec3(axis_value(i, resolution), 0.0, axis_value(j, resolution)), pts);
    }
  }
  return grid_search(
      pts, [&](const BlochState& s) { return t_fast_ad(s, eps, p); },
      [&](const BlochState& s) { return t_free_ad(s, eps, p); }, resolution, false, jobs);
}

// ---------------------------------------------------------------------------

double t_free_dp(const BlochState& s0, double eps, const Depolarizing& rates) {
  require_eps(eps);
  const Vec3 g = rates.big_gammas();
  const Vec3 r = s0.vec();
  const double n = r.norm();
  if (n <= eps) return 0.0;

  double stuck = 0.0;
  double slowest = kInf;
  for (int i = 0; i < 3; ++i) {
    if (r(i) == 0.0) continue;
    if (g(i) == 0.0) {
      stuck += r(i) * r(i);
    } else {
      slowest = std::min(slowest, g(i));
    }
  }
  if (stuck >= eps * eps) return kInf;

  const double eps2 = eps * eps;
  auto f = [&](double t) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += std::exp(-4.0 * g(i) * t) * r(i) * r(i);
    return 0.5 * std::log(s) - std::log(eps);
  };
  double lo = std::log(n / eps) / (2.0 * g.maxCoeff());
  double hi = std::log((n * n - stuck) / (eps2 - stuck)) / (4.0 * slowest);
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo <= 0.0) return lo;
  if (fhi >= 0.0) return hi;
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(), iters);
  return 0.5 * (root.first + root.second);
}

double t_fast_dp(const BlochState& s0, double eps, const Depolarizing& rates) {
  require_eps(eps);
  const double n = s0.norm();
  if (n <= eps) return 0.0;
  return std::log(n / eps) / (2.0 * rates.big_gammas().maxCoeff());
}

double v_dp(double r, double theta, double phi, const Depolarizing& rates) {
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  const double ux = st * std::cos(phi), uy = st * std::sin(phi);
  return -2.0 * r * r *
         (rates.big_gamma_x() * ux * ux + rates.big_gamma_y() * uy * uy +
          rates.big_gamma_z() * ct * ct);
}

Vec3 fast_direction_dp(const Depolarizing& rates) {
  Vec3::Index i = 0;
  rates.big_gammas().maxCoeff(&i);
  return Vec3::Unit(i);
}

WorstCase worst_case_times_dp(double eps, const Depolarizing& rates) {
  require_eps(eps);
  const double l = eps < 1.0 ? -std::log(eps) : 0.0;
  const Vec3 g = rates.big_gammas();
  const double gmin = g.minCoeff();
  return {l / (2.0 * g.maxCoeff()), l == 0.0 ? 0.0 : (gmin > 0.0 ? l / (2.0 * gmin) : kInf)};
}

GridWorstCase grid_worst_case_dp(double eps, const Depolarizing& rates, int resolution,
                                 int jobs) {
  require_eps(eps);
  require_resolution(resolution);
  std::vector<Vec3> pts;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      for (int k = 0; k < resolution; ++k) {
        admit(Vec3(axis_value(i, resolution), axis_value(j, resolution),
                   axis_value(k, resolution)),
              pts);
      }
    }
  }
  return grid_search(
      pts, [&](const BlochState& s) { return t_fast_dp(s, eps, rates); },
      [&](const BlochState& s) { return t_free_dp(s, eps, rates); }, resolution, true, jobs);
}

bool dp_control_useless(const Depolarizing& rates) {
  const Vec3 g = rates.big_gammas();
  return g.maxCoeff() - g.minCoeff() <= 1e-14 * std::max(1.0, g.maxCoeff());
}

// ---------------------------------------------------------------------------

Vec3 natural_fixed_point_pd(const BlochState& s0) { return Vec3(0.0, 0.0, s0.z()); }

double t_free_pd(const BlochState& s0, double eps, double ghat) {
  require_eps(eps);
  require_rate(ghat, "phase damping rate");
  const double rho = std::hypot(s0.x(), s0.y());
  if (rho <= eps) return 0.0;
  return std::log(rho / eps) / (2.0 * ghat);
}

double t_fast_pd(const BlochState& s0, double eps, double ghat) {
  require_eps(eps);
  require_rate(ghat, "phase damping rate");
  const double floor = std::abs(s0.z()) + eps;
  const double ri = s0.norm();
  if (ri <= floor) return 0.0;
  return std::log(ri / floor) / (2.0 * ghat);
}

WorstCase worst_case_times_pd(double eps, double ghat) {
  require_eps(eps);
  require_rate(ghat, "phase damping rate");
  const double t = eps < 1.0 ? -std::log(eps) / (2.0 * ghat) : 0.0;
  return {t, t};
}

// ---------------------------------------------------------------------------

double analytic_fast_time(const LindbladChannel& ch, const BlochState& s0, double eps) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, AmplitudeDamping>) {
          return t_fast_ad(s0, eps, {k.gamma, k.beta});
        } else if constexpr (std::is_same_v<K, Depolarizing>) {
          return t_fast_dp(s0, eps, k);
        } else if constexpr (std::is_same_v<K, PhaseDamping>) {
          return t_fast_pd(s0, eps, k.ghat);
        } else {
          return std::numeric_limits<double>::quiet_NaN();
        }
      },
      ch.kind());
}

double analytic_free_time(const LindbladChannel& ch, const BlochState& s0, double eps) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, AmplitudeDamping>) {
          return t_free_ad(s0, eps, {k.gamma, k.beta});
        } else if constexpr (std::is_same_v<K, Depolarizing>) {
          return t_free_dp(s0, eps, k);
        } else if constexpr (std::is_same_v<K, PhaseDamping>) {
          return t_free_pd(s0, eps, k.ghat);
        } else {
          return std::numeric_limits<double>::quiet_NaN();
        }
      },
      ch.kind());
}

}  // namespace bloch_relax::analytic
