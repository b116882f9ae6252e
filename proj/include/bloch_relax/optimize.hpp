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

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bloch_relax/channels.hpp"
#include "bloch_relax/control.hpp"
#include "bloch_relax/dopri5.hpp"
#include "bloch_relax/nelder_mead.hpp"

namespace bloch_relax {

/// Everything needed to evaluate one hitting time except the coefficients
/// and the bound m.
struct HittingProblem {
  LindbladChannel channel;
  BlochState s0;
  double eps = 0.04;
  CrabControl control;  // tau, n_modes, omega, drift_ramp; coeffs and m are overridden
  IntegratorConfig integrator;

  /// Target: the fixed point the uncontrolled flow would reach from s0.
  BlochState target() const;
};

struct HittingOutcome {
  double objective = 0.0;             // hitting time, or tau + |r(tau) - target| when missed
  std::optional<double> hitting_time;
};

/// First entry into the eps-ball around `target` within [0, tau] under the
/// control `c`. Misses are mapped to the continuous surrogate tau + distance.
HittingOutcome hitting_time_outcome(const CrabControl& c, const LindbladChannel& ch,
                                    const BlochState& s0, const BlochState& target, double eps,
                                    IntegratorConfig cfg);

/// Objective value only, with the target taken from the channel's fixed points.
double hitting_time_objective(const CrabControl& c, const LindbladChannel& ch,
                              const BlochState& s0, double eps, const IntegratorConfig& cfg);

struct RestartOutcome {
  int index = 0;
  std::vector<double> start;
  std::vector<double> coeffs;
  double objective = 0.0;
  std::optional<double> hitting_time;
  long evaluations = 0;
  bool converged = false;
};

struct OptimizeReport {
  double m = 0.0;
  std::vector<double> best_coeffs;
  std::optional<double> T_m;  // empty when no restart reached the ball
  double objective = 0.0;
  long evaluations = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  int best_restart = 0;
  std::vector<RestartOutcome> outcomes;
};

struct OptimizeSettings {
  NelderMeadOptions nelder_mead;
  int jobs = 1;
};

/// Best of `restarts` bounded Nelder-Mead runs over the 3 n_modes coefficients
/// in (-1, 1). Restart k starts from coefficients drawn uniformly by a
/// generator seeded with (seed, k), so outcomes do not depend on `jobs` or on
/// the total restart count. Ties go to the lowest restart index.
OptimizeReport optimize_T_m(double m, const HittingProblem& problem, int restarts,
                            std::uint64_t seed, const OptimizeSettings& settings = {});

/// One optimize_T_m per entry of `ms` (ascending), each with the same seed.
std::vector<OptimizeReport> sweep_m(const std::vector<double>& ms, const HittingProblem& problem,
                                    int restarts, std::uint64_t seed,
                                    const OptimizeSettings& settings = {});

struct SlopeFit {
  double T_bar = 0.0;     // intercept of T = T_bar - A m
  double A = 0.0;         // minus the slope
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares of T on m. Throws DomainError for fewer than three
/// points or when all m coincide.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& m_and_T);

/// Running minimum of the sequence (the best time found up to each m).
std::vector<double> running_minimum(const std::vector<double>& values);

nlohmann::json to_json(const OptimizeReport& r);

}  // namespace bloch_relax
