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

#include "bloch_relax/bloch.hpp"
#include "bloch_relax/channels.hpp"

namespace bloch_relax::analytic {

/// Generalised amplitude damping parameters.
struct AdParams {
  double gamma = 0.0;
  double beta = 0.0;

  double r_fp() const { return std::tanh(0.5 * beta); }
  /// Throws DomainError unless gamma > 0 and beta > 0.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Amplitude damping

/// Free relaxation time into the eps-ball around (0, 0, -r_fp). The on-axis
/// case (r_x = r_y = 0) uses the z-equation directly, (r_fp/gamma) ln(|z + r_fp|/eps).
double t_free_ad(const BlochState& s0, double eps, const AdParams& p);

/// Purity speed dP/dt at radius r and polar angle theta (independent of phi).
double v_ad(double r, double theta, const AdParams& p);
/// Best cooling speed, v_ad(r, pi) = gamma r (1 - r/r_fp).
double v_cool(double r, const AdParams& p);
/// Best heating speed, v_ad(r, 0) = -gamma r (1 + r/r_fp).
double v_heat(double r, const AdParams& p);

enum class AdRegime { cooling, within, heating };
AdRegime ad_regime(double r_i, double eps, const AdParams& p);

/// Minimal relaxation time with unbounded instantaneous rotations.
double t_fast_ad(const BlochState& s0, double eps, const AdParams& p);

/// Direction to rotate onto before relaxing freely: -z when cooling, +z when
/// heating, the current direction (or -z for r = 0) when already within reach.
Vec3 fast_direction_ad(const BlochState& s0, double eps, const AdParams& p);

/// Polar angle where the purity speed vanishes for r_i <= r_fp. Throws
/// DomainError for r_i > r_fp or r_i <= 0.
double theta_stall(double r_i, const AdParams& p);

struct SphericalRates {
  double r_dot = 0.0;
  double theta_dot = 0.0;
  double phi_dot = 0.0;
  bool phi_defined = true;  // false on the z-axis, where phi_dot is NaN
};

/// Controlled amplitude damping equation in spherical coordinates. For the
/// family gamma = e^beta - 1 the dissipative prefactor gamma/(2 r_fp) equals
/// 1/(1 - r_fp). Throws DomainError at r = 0.
SphericalRates spherical_rhs_ad(const SphericalCoords& c, const Vec3& h, const AdParams& p);

// ---------------------------------------------------------------------------
// Worst-case times over initial states

struct WorstCase {
  double t_fast_max = 0.0;
  double t_free_max = 0.0;
  double ratio() const { return t_fast_max > 0.0 ? t_free_max / t_fast_max : 0.0; }
};

/// Leading order in eps: ((r_fp/gamma)|ln eps|, 2 (r_fp/gamma)|ln eps|).
WorstCase worst_case_times_ad(double eps, const AdParams& p);

struct GridMaximum {
  double value = 0.0;
  Vec3 argmax = Vec3::Zero();
};

struct GridWorstCase {
  GridMaximum fast;
  GridMaximum free;
  double ratio() const { return fast.value > 0.0 ? free.value / fast.value : 0.0; }
};

/// Grid maximisation of t_fast_ad and t_free_ad over the y = 0 disc (the
/// problem is symmetric about z) with `resolution` points per axis, followed
/// by two rounds of local refinement around each maximiser.
GridWorstCase grid_worst_case_ad(double eps, const AdParams& p, int resolution, int jobs = 1);

// ---------------------------------------------------------------------------
// Depolarizing

/// Free relaxation time into the eps-ball around the origin: the unique root
/// of |r(t)| = eps, solved by TOMS 748 to full precision. Infinite when a
/// component with zero contraction rate alone exceeds eps.
double t_free_dp(const BlochState& s0, double eps, const Depolarizing& rates);
/// ln(r_i/eps) / (2 Gamma_max); 0 when r_i <= eps.
double t_fast_dp(const BlochState& s0, double eps, const Depolarizing& rates);
double v_dp(double r, double theta, double phi, const Depolarizing& rates);
/// Coordinate axis with the largest Gamma (the smallest gamma).
Vec3 fast_direction_dp(const Depolarizing& rates);
/// (|ln eps|/(2 Gamma_max), |ln eps|/(2 Gamma_min)).
WorstCase worst_case_times_dp(double eps, const Depolarizing& rates);
/// Cubic grid over the ball (no azimuthal symmetry to exploit).
GridWorstCase grid_worst_case_dp(double eps, const Depolarizing& rates, int resolution,
                                 int jobs = 1);
/// True when Gamma_x = Gamma_y = Gamma_z, where no control helps.
bool dp_control_useless(const Depolarizing& rates);

// ---------------------------------------------------------------------------
// Phase damping

/// Fixed point reached without control: (0, 0, r_iz).
Vec3 natural_fixed_point_pd(const BlochState& s0);
/// ln(sqrt(r_x^2 + r_y^2)/eps) / (2 ghat), clamped at 0.
double t_free_pd(const BlochState& s0, double eps, double ghat);
/// ln(r_i/(|r_iz| + eps)) / (2 ghat) for r_i > |r_iz| + eps, else 0.
double t_fast_pd(const BlochState& s0, double eps, double ghat);
/// Both worst cases equal |ln eps|/(2 ghat).
WorstCase worst_case_times_pd(double eps, double ghat);

// ---------------------------------------------------------------------------

/// Closed-form unconstrained optimum for the named channels (NaN for generic).
double analytic_fast_time(const LindbladChannel& ch, const BlochState& s0, double eps);
/// Closed-form free relaxation time for the named channels (NaN for generic).
double analytic_free_time(const LindbladChannel& ch, const BlochState& s0, double eps);

}  // namespace bloch_relax::analytic
