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

#include <Eigen/Core>

namespace bloch_relax {

using Vec3 = Eigen::Vector3d;

/// Tolerances on |r| for states coming out of numerical integration. Below
/// kAcceptDrift the vector is kept verbatim, up to kMaxDrift it is pulled back
/// onto the unit sphere, above it the state is rejected.
inline constexpr double kStateTolerance = 1e-12;
inline constexpr double kAcceptDrift = 1e-9;
inline constexpr double kMaxDrift = 1e-6;

/// Qubit state as a Bloch vector, rho = (I + r.sigma)/2, with |r| <= 1.
class BlochState {
 public:
  BlochState() = default;
  BlochState(double x, double y, double z);
  /// Throws DomainError unless |r| <= 1 + kStateTolerance.
  explicit BlochState(const Vec3& r);

  /// Wraps an integrator output, applying the drift policy above.
  static BlochState from_integrator(const Vec3& r);

  const Vec3& vec() const { return r_; }
  double x() const { return r_.x(); }
  double y() const { return r_.y(); }
  double z() const { return r_.z(); }
  double norm() const { return r_.norm(); }

  friend bool operator==(const BlochState& a, const BlochState& b) { return a.r_ == b.r_; }

 private:
  struct Unchecked {};
  BlochState(const Vec3& r, Unchecked) : r_(r) {}

  Vec3 r_ = Vec3::Zero();
};

/// Polar angle theta is measured from +z; azimuth phi lies in [-pi, pi).
struct SphericalCoords {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Tr[rho^2] = (1 + |r|^2)/2.
double purity(const BlochState& s);

/// D = Tr|rho_a - rho_b|/2 = |a - b|/2.
double trace_distance(const BlochState& a, const BlochState& b);

/// Rigid rotation about `axis` (normalised internally; a zero axis throws).
BlochState rotate(const BlochState& s, const Vec3& axis, double angle);

/// Rotation taking the direction of `s` onto `direction`, keeping |s|.
/// With s = 0 the state is returned unchanged.
BlochState rotate_to(const BlochState& s, const Vec3& direction);

/// r = 0 maps to (0, 0, 0).
SphericalCoords to_spherical(const BlochState& s);
BlochState from_spherical(const SphericalCoords& c);

/// Orthonormal spherical frame (e_r, e_theta, e_phi) at the given angles.
struct SphericalFrame {
  Vec3 e_r;
  Vec3 e_theta;
  Vec3 e_phi;
};
SphericalFrame spherical_frame(double theta, double phi);

}  // namespace bloch_relax
