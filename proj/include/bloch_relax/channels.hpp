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

#include <complex>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "bloch_relax/bloch.hpp"

namespace bloch_relax {

using Vec3c = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;

/// One Lindblad operator L = sqrt(rate) * (l . sigma) with |l| = 1.
struct LindbladTerm {
  double rate = 0.0;
  Vec3c l = Vec3c::Zero();
};

/// Generalised amplitude damping. The operator-level rates of sigma_+ and
/// sigma_- are gamma/(e^beta - 1) and gamma e^beta/(e^beta - 1); the stored
/// unit-vector rates are half of those because sigma_+- = (l . sigma)/sqrt(2).
struct AmplitudeDamping {
  double gamma = 0.0;
  double beta = 0.0;
  double fixed_point_radius() const;  // tanh(beta/2)
  double raising_rate() const;        // coefficient of sigma_+
  double lowering_rate() const;       // coefficient of sigma_-
};

struct Depolarizing {
  double gx = 0.0;
  double gy = 0.0;
  double gz = 0.0;
  // Axis contraction rates: Gamma_x = gy + gz, and cyclic.
  double big_gamma_x() const { return gy + gz; }
  double big_gamma_y() const { return gx + gz; }
  double big_gamma_z() const { return gx + gy; }
  Vec3 big_gammas() const { return {big_gamma_x(), big_gamma_y(), big_gamma_z()}; }
};

struct PhaseDamping {
  double ghat = 0.0;
};

struct GenericChannel {};

using ChannelKind = std::variant<AmplitudeDamping, Depolarizing, PhaseDamping, GenericChannel>;

/// Markovian qubit dissipator in the traceless orthonormal gauge. Immutable;
/// the affine Bloch-space velocity r -> M r + k is cached at construction.
class LindbladChannel {
 public:
  /// Validates rates >= 0, at most three terms, l_a . conj(l_b) = delta_ab.
  explicit LindbladChannel(std::vector<LindbladTerm> terms, ChannelKind kind = GenericChannel{});

  const std::vector<LindbladTerm>& terms() const { return terms_; }
  const ChannelKind& kind() const { return kind_; }
  const Mat3& linear_part() const { return linear_; }
  const Vec3& offset() const { return offset_; }

  /// Largest single rate; used as the time scale of the channel.
  double reference_rate() const;

  /// Dissipative velocity M r + k without any state validation.
  Vec3 velocity(const Vec3& r) const { return linear_ * r + offset_; }

 private:
  std::vector<LindbladTerm> terms_;
  ChannelKind kind_;
  Mat3 linear_ = Mat3::Zero();
  Vec3 offset_ = Vec3::Zero();
};

/// Throws DomainError for gamma <= 0 or beta <= 0.
LindbladChannel amplitude_damping(double gamma, double beta);
/// Rates >= 0, at least one positive.
LindbladChannel depolarizing(double gx, double gy, double gz);
LindbladChannel phase_damping(double ghat);

/// 2 sum_a rate_a [Re((l_a . r) conj(l_a)) - r + i (l_a x conj(l_a))].
Vec3 dissipator_velocity(const LindbladChannel& ch, const BlochState& s);

/// Affine set of stationary states: base + span(directions), clipped to the ball.
struct FixedPointSet {
  BlochState base;
  std::vector<Vec3> directions;

  /// Orthogonal projection of `s` onto the set (the "natural" fixed point).
  Vec3 project(const Vec3& s) const;
  bool unique() const { return directions.empty(); }
};

/// Rank-revealing solve of M r = -k. Throws DomainError when the system is
/// inconsistent or the minimum-norm solution lies outside the ball.
FixedPointSet fixed_points(const LindbladChannel& ch);

struct DissipatorCoefficients {
  double a_plus = 0.0;
  double a_minus = 0.0;
  double b = 0.0;
  std::complex<double> c;
  std::complex<double> d_plus;
  std::complex<double> d_minus;
};

DissipatorCoefficients coefficients(const LindbladChannel& ch);

/// dP/dt of the uncontrolled dissipator, evaluated from the coefficient form
/// in spherical coordinates.
double purity_speed(const LindbladChannel& ch, const BlochState& s);
double purity_speed(const DissipatorCoefficients& k, const SphericalCoords& c);

/// JSON channel specification, e.g. {"kind": "amplitude_damping", "gamma": 1, "beta": 2}.
LindbladChannel channel_from_json(const nlohmann::json& j);
nlohmann::json channel_to_json(const LindbladChannel& ch);

}  // namespace bloch_relax
