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

#include "bloch_relax/analytic.hpp"
#include "bloch_relax/control.hpp"
#include "bloch_relax/dopri5.hpp"

namespace bloch_relax::analytic {

/// Linear response of the amplitude damping hitting time to a weak control,
/// T_m ~ T_bar - m A, computed along the uncontrolled (drift-only)
/// trajectory with theta as the integration variable.
struct WeakFieldReport {
  double T_bar = 0.0;        // integral of dtheta / thetadot_0
  double A = 0.0;            // slope for the given coefficients
  double A_bound = 0.0;      // coefficient-independent upper bound on A
  double D = 0.0;            // endpoint correction, A = I / (1 - D)
  double gamma_integral = 0.0;  // integral of Gamma / thetadot_0^2
  double hitting_time = 0.0;    // the same T_bar from the event detector
  double theta_i = 0.0;
  double theta_bar = 0.0;
  double r_bar = 0.0;
  /// The bound assumes every sin(2 pi n t/tau) keeps one sign on [0, T_bar],
  /// i.e. T_bar <= tau/(2 n_modes).
  bool bound_hypothesis = false;
};

/// Requires theta to increase monotonically along the uncontrolled path
/// (cooling, or heating close enough to the fixed point); throws DomainError
/// otherwise, and when |1 - D| < 1e-6.
WeakFieldReport weak_field_report(const BlochState& s0, double eps, const AdParams& p,
                                  const CrabControl& control, const IntegratorConfig& cfg = {});

}  // namespace bloch_relax::analytic
