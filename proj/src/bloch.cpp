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

#include "bloch_relax/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "bloch_relax/errors.hpp"

namespace bloch_relax {

BlochState::BlochState(double x, double y, double z) : BlochState(Vec3(x, y, z)) {}

BlochState::BlochState(const Vec3& r) : r_(r) {
  if (!r.allFinite()) {
    throw DomainError("Bloch vector has non-finite components");
  }
  if (r.norm() > 1.0 + kStateTolerance) {
    throw DomainError("Bloch vector outside the unit ball: |r| = " + std::to_string(r.norm()));
  }
}

BlochState BlochState::from_integrator(const Vec3& r) {
  if (!r.allFinite()) {
    throw NumericalError("integrator produced a non-finite state");
  }
  const double n = r.norm();
  if (n <= 1.0 + kAcceptDrift) {
    return BlochState(r, Unchecked{});
  }
  if (n <= 1.0 + kMaxDrift) {
    return BlochState(r / n, Unchecked{});
  }
  throw NumericalError("integrator drifted outside the Bloch ball: |r| = " + std::to_string(n));
}

double purity(const BlochState& s) { return 0.5 * (1.0 + s.vec().squaredNorm()); }

double trace_distance(const BlochState& a, const BlochState& b) {
  return 0.5 * (a.vec() - b.vec()).norm();
}

BlochState rotate(const BlochState& s, const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 1e-300) || !std::isfinite(n)) {
    throw DomainError("rotation axis must be a nonzero finite vector");
  }
  const Eigen::AngleAxisd rot(angle, axis / n);
  return BlochState::from_integrator(rot * s.vec());
}

BlochState rotate_to(const BlochState& s, const Vec3& direction) {
  const double r = s.norm();
  const double dn = direction.norm();
  if (!(dn > 0.0)) {
    throw DomainError("target direction must be nonzero");
  }
  if (r == 0.0) {
    return s;
  }
  return BlochState::from_integrator(direction * (r / dn));
}

SphericalCoords to_spherical(const BlochState& s) {
  const double r = s.norm();
  if (r == 0.0) {
    return {};
  }
  const double theta = std::acos(std::clamp(s.z() / r, -1.0, 1.0));
  double phi = std::atan2(s.y(), s.x());
  if (phi >= std::numbers::pi) {
    phi -= 2.0 * std::numbers::pi;
  }
  return {r, theta, phi};
}

BlochState from_spherical(const SphericalCoords& c) {
  const double st = std::sin(c.theta);
  return BlochState(
      Vec3(c.r * st * std::cos(c.phi), c.r * st * std::sin(c.phi), c.r * std::cos(c.theta)));
}

SphericalFrame spherical_frame(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  return {Vec3(st * cp, st * sp, ct), Vec3(ct * cp, ct * sp, -st), Vec3(-sp, cp, 0.0)};
}

}  // namespace bloch_relax
