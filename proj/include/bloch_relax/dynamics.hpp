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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bloch_relax/bloch.hpp"
#include "bloch_relax/channels.hpp"
#include "bloch_relax/dopri5.hpp"

namespace bloch_relax {

/// Time-dependent effective magnetic field h(t) of H = h . sigma.
using ControlField = std::function<Vec3(double)>;

/// h(t) = 0.
ControlField zero_field();
/// h(t) = h for all t.
ControlField constant_field(const Vec3& h);

/// Right-hand side of the controlled master equation, 2 h x r + M r + k.
Vec3 bloch_rhs(const LindbladChannel& ch, const Vec3& h, const Vec3& r);

enum class TerminalReason {
  horizon,   // ran to t_max
  ball_hit,  // stopped at the first entry into the target region
  stalled,   // ran to t_max and ended on an equilibrium of the controlled flow
};

const char* to_string(TerminalReason reason);

struct TrajectorySample {
  double t = 0.0;
  BlochState state;
};

/// Accepted integrator steps with their continuous extensions. Immutable once
/// returned from evolve().
class Trajectory {
 public:
  Trajectory() = default;
  /// With `t_stop` the trajectory ends inside the last step (event hits).
  Trajectory(BlochState initial, std::vector<DenseStep> steps, IntegrationStats stats,
             TerminalReason reason, std::optional<double> t_stop = std::nullopt);

  /// (t, state) at t = 0 and at the end of every accepted step.
  const std::vector<TrajectorySample>& samples() const { return samples_; }
  const std::vector<DenseStep>& steps() const { return steps_; }
  const IntegrationStats& stats() const { return stats_; }
  TerminalReason reason() const { return reason_; }

  double t_end() const { return samples_.empty() ? 0.0 : samples_.back().t; }
  const BlochState& final_state() const { return samples_.back().state; }

  /// Dense-output state at any t in [0, t_end()].
  BlochState at(double t) const;

 private:
  std::vector<DenseStep> steps_;
  std::vector<TrajectorySample> samples_;
  IntegrationStats stats_;
  TerminalReason reason_ = TerminalReason::horizon;
};

/// Integrates the controlled master equation on [0, cfg.t_max].
Trajectory evolve(const LindbladChannel& ch, const ControlField& field, const BlochState& s0,
                  const IntegratorConfig& cfg);

/// Scalar event function; the event fires at the first t with g(t, r) <= 0.
using EventFunction = std::function<double(double, const Vec3&)>;

struct HitResult {
  std::optional<double> time;  // empty when the event never fired before t_max
  Trajectory trajectory;       // truncated at the hit
};

/// Sign-change bracketing over accepted steps (checked at sub-step points on
/// the dense output), then bisection to full double precision. Grazing contact
/// with min g < kGrazingTol and no sign change counts as a hit.
HitResult first_hit(const LindbladChannel& ch, const ControlField& field, const BlochState& s0,
                    const EventFunction& g, const IntegratorConfig& cfg);

inline constexpr double kGrazingTol = 1e-12;

/// First time with |r(t) - center| <= eps; 0 if s0 already satisfies it.
std::optional<double> time_to_ball(const LindbladChannel& ch, const ControlField& field,
                                   const BlochState& s0, const BlochState& center, double eps,
                                   const IntegratorConfig& cfg);

/// Uncontrolled amplitude damping solution started from s0.
BlochState closed_form_ad(const BlochState& s0, double t, double gamma, double beta);
/// Uncontrolled depolarizing solution, axis rates 2 Gamma_{x,y,z}.
BlochState closed_form_dp(const BlochState& s0, double t, double gx, double gy, double gz);
/// Uncontrolled dephasing; r_z is conserved.
BlochState closed_form_pd(const BlochState& s0, double t, double ghat);

/// Constant field that freezes `s`: the minimum-norm h with
/// 2 h x r = -dissipator_velocity(s). Throws DomainError when the radial
/// velocity at s exceeds kStallTol (unitaries cannot cancel it).
Vec3 stall_control(const LindbladChannel& ch, const BlochState& s);

inline constexpr double kStallTol = 1e-9;

/// Unconstrained-control protocol with idealised instantaneous rotations:
/// rotate s0 onto `direction`, relax freely until ||r| - |center|| <= eps,
/// then rotate onto the direction of `center`.
struct RotationProtocolResult {
  std::optional<double> time;
  BlochState after_first_rotation;
  BlochState before_final_rotation;
  BlochState final_state;
  Trajectory decay;
};

RotationProtocolResult rotate_decay_rotate(const LindbladChannel& ch, const BlochState& s0,
                                           const Vec3& direction, const BlochState& center,
                                           double eps, const IntegratorConfig& cfg);

/// CSV with header t,r_x,r_y,r_z,purity; 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace bloch_relax
