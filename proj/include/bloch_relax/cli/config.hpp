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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bloch_relax/bloch.hpp"
#include "bloch_relax/channels.hpp"
#include "bloch_relax/control.hpp"
#include "bloch_relax/dopri5.hpp"
#include "bloch_relax/nelder_mead.hpp"

namespace bloch_relax::cli {

struct OptimizerConfig {
  int restarts = 16;
  NelderMeadOptions nelder_mead;
  std::vector<double> m_values;  // for sweep and slope

  bool operator==(const OptimizerConfig&) const = default;
};

/// Complete description of one run. With natural_units set, every time-valued
/// entry (integrator t_max and max_step, control tau) is read in units of
/// 1/rate, where rate is the channel's reference rate, and reported times use
/// the same unit. Field strengths (omega, m) are always absolute.
struct RunConfig {
  nlohmann::json channel;  // canonical channel specification
  Vec3 initial_state = Vec3::Zero();
  double eps = 0.04;
  bool natural_units = false;
  IntegratorConfig integrator;
  std::optional<CrabControl> control;  // absent: uncontrolled runs only
  OptimizerConfig optimizer;
  int grid_resolution = 101;
  std::string output_path;  // empty: stdout
  std::string format;       // "csv", "json" or empty for the command default
  std::uint64_t seed = 0;
  int jobs = 1;

  bool operator==(const RunConfig&) const = default;

  LindbladChannel make_channel() const;
  BlochState make_state() const;
  /// Seconds per configured time unit: 1 or 1/reference_rate.
  double time_unit() const;
  /// Integrator settings and control horizon converted to absolute time.
  IntegratorConfig absolute_integrator() const;
  std::optional<CrabControl> absolute_control() const;
  /// The control, or ConfigError naming the command that needs it.
  CrabControl require_control(const char* command) const;
};

/// Throws ConfigError on missing or malformed fields.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

}  // namespace bloch_relax::cli
