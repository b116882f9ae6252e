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

#include <string>

#include <nlohmann/json.hpp>

#include "bloch_relax/cli/config.hpp"
#include "bloch_relax/optimize.hpp"

namespace bloch_relax::cli {

/// Every closed-form quantity that applies to the configured channel and
/// initial state, keyed by descriptive name.
nlohmann::json cmd_analytic(const RunConfig& cfg);

/// CSV r_x,r_z,T_free,T_fast over the y = 0 plane, restricted to the ball.
/// Throws ConfigError for resolution < 16 or channels without closed forms.
std::string cmd_sweep_grid(const RunConfig& cfg, int resolution);

/// Trajectory under the configured control (or none): CSV t,r_x,r_y,r_z,purity
/// or a JSON document, following cfg.format.
std::string cmd_simulate(const RunConfig& cfg);

OptimizeReport optimize_from_config(const RunConfig& cfg, double m);
/// OptimizeReport as JSON, times in the configured unit.
nlohmann::json cmd_optimize(const RunConfig& cfg, double m);

/// CSV (or JSON) of m, T_m, T_fast_analytic over optimizer.m_values.
std::string cmd_sweep(const RunConfig& cfg);

struct SlopeOutput {
  std::string csv;        // m,T_m
  nlohmann::json summary; // fitted intercept and slope, quadrature T_bar and bound
};
SlopeOutput cmd_slope(const RunConfig& cfg);

}  // namespace bloch_relax::cli
