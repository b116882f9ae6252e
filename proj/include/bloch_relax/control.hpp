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

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bloch_relax/bloch.hpp"
#include "bloch_relax/dynamics.hpp"

namespace bloch_relax {

/// Chopped-random-basis control with a drift term:
///   h(t) = (omega/2) e_z + (t/tau)(1, 1, 1) + m * clamp(h_C(t)),
///   h_C(t) = t/(tau n_modes) sum_{n, mu} coeffs[3(n-1) + mu] sin(2 pi n t/tau) e_mu,
/// where clamp rescales h_C(t) to unit norm when it is longer than 1. The
/// ramp (t/tau)(1, 1, 1) is present only when drift_ramp is set.
struct CrabControl {
  std::vector<double> coeffs;
  double tau = 10.0;
  int n_modes = 10;
  double m = 0.0;
  double omega = 0.0;
  bool drift_ramp = true;

  std::size_t dimension() const { return 3 * static_cast<std::size_t>(n_modes); }
  /// Checks tau > 0, n_modes >= 1, m >= 0, |coeff| <= 1 and that coeffs is
  /// either empty (all zero) or of size 3 n_modes.
  void validate() const;
  bool operator==(const CrabControl&) const = default;
};

/// Drift part h_D(t).
Vec3 drift_field(const CrabControl& c, double t);
/// Norm-clamped control direction clamp(h_C(t)); |result| <= 1.
Vec3 control_shape(const CrabControl& c, double t);
/// Full field h_D(t) + m clamp(h_C(t)). Throws DomainError outside [0, tau].
Vec3 control_field(const CrabControl& c, double t);
/// Wraps the control as a ControlField for the integrator.
ControlField make_field(CrabControl c);

nlohmann::json to_json(const CrabControl& c);
CrabControl crab_from_json(const nlohmann::json& j);

}  // namespace bloch_relax
