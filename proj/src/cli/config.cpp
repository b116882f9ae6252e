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

#include "bloch_relax/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "bloch_relax/errors.hpp"

namespace bloch_relax::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
  }
}

const json& object_at(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_object()) throw ConfigError(std::string("\"") + key + "\" must be an object");
  return v;
}

IntegratorConfig integrator_from_json(const json& j) {
  reject_unknown(j, {"rel_tol", "abs_tol", "max_step", "t_max", "max_steps"}, "integrator");
  IntegratorConfig c;
  c.rel_tol = j.value("rel_tol", c.rel_tol);
  c.abs_tol = j.value("abs_tol", c.abs_tol);
  if (j.contains("max_step") && !j.at("max_step").is_null()) {
    c.max_step = j.at("max_step").get<double>();
  }
  c.t_max = j.value("t_max", c.t_max);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.validate();
  return c;
}

json integrator_to_json(const IntegratorConfig& c) {
  return {{"rel_tol", c.rel_tol},
          {"abs_tol", c.abs_tol},
          {"max_step", std::isfinite(c.max_step) ? json(c.max_step) : json(nullptr)},
          {"t_max", c.t_max},
          {"max_steps", c.max_steps}};
}

OptimizerConfig optimizer_from_json(const json& j) {
  reject_unknown(j, {"restarts", "initial_step", "x_tol", "max_evals", "m_values"}, "optimizer");
  OptimizerConfig c;
  c.restarts = j.value("restarts", c.restarts);
  c.nelder_mead.initial_step = j.value("initial_step", c.nelder_mead.initial_step);
  c.nelder_mead.x_tol = j.value("x_tol", c.nelder_mead.x_tol);
  c.nelder_mead.max_evals = j.value("max_evals", c.nelder_mead.max_evals);
  c.m_values = j.value("m_values", c.m_values);
  if (c.restarts < 1) throw ConfigError("optimizer.restarts must be at least 1");
  if (!(c.nelder_mead.initial_step > 0.0) || !(c.nelder_mead.x_tol > 0.0) ||
      c.nelder_mead.max_evals < 1) {
    throw ConfigError("optimizer step, tolerance and evaluation budget must be positive");
  }
  for (double m : c.m_values) {
    if (!std::isfinite(m) || m < 0.0) throw ConfigError("optimizer.m_values must be >= 0");
  }
  if (!std::is_sorted(c.m_values.begin(), c.m_values.end())) {
    throw ConfigError("optimizer.m_values must be sorted ascending");
  }
  return c;
}

json optimizer_to_json(const OptimizerConfig& c) {
  return {{"restarts", c.restarts},
          {"initial_step", c.nelder_mead.initial_step},
          {"x_tol", c.nelder_mead.x_tol},
          {"max_evals", c.nelder_mead.max_evals},
          {"m_values", c.m_values}};
}

}  // namespace

LindbladChannel RunConfig::make_channel() const { return channel_from_json(channel); }

BlochState RunConfig::make_state() const { return BlochState(initial_state); }

double RunConfig::time_unit() const {
  return natural_units ? 1.0 / make_channel().reference_rate() : 1.0;
}

IntegratorConfig RunConfig::absolute_integrator() const {
  IntegratorConfig c = integrator;
  const double u = time_unit();
  c.t_max *= u;
  c.max_step *= u;
  return c;
}

std::optional<CrabControl> RunConfig::absolute_control() const {
  if (!control) return std::nullopt;
  CrabControl c = *control;
  c.tau *= time_unit();
  return c;
}

CrabControl RunConfig::require_control(const char* command) const {
  if (!control) {
    throw ConfigError(std::string(command) +
                      " needs a \"control\" section (at least \"omega\")");
  }
  return *absolute_control();
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(j,
                 {"channel", "initial_state", "eps", "natural_units", "integrator", "control",
                  "optimizer", "grid", "output", "seed", "jobs"},
                 "configuration");
  RunConfig c;
  try {
    if (!j.contains("channel")) throw ConfigError("configuration needs a \"channel\" section");
    c.channel = channel_to_json(channel_from_json(j.at("channel")));

    if (!j.contains("initial_state")) throw ConfigError("configuration needs \"initial_state\"");
    const auto s = j.at("initial_state").get<std::vector<double>>();
    if (s.size() != 3) throw ConfigError("initial_state must have three components");
    c.initial_state = Vec3(s[0], s[1], s[2]);
    try {
      (void)BlochState(c.initial_state);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("initial_state: ") + e.what());
    }

    c.eps = j.value("eps", c.eps);
    if (!std::isfinite(c.eps) || c.eps <= 0.0) throw ConfigError("eps must be positive");
    c.natural_units = j.value("natural_units", c.natural_units);
    if (j.contains("integrator")) c.integrator = integrator_from_json(object_at(j, "integrator"));
    if (j.contains("control") && !j.at("control").is_null()) {
      c.control = crab_from_json(object_at(j, "control"));
    }
    if (j.contains("optimizer")) c.optimizer = optimizer_from_json(object_at(j, "optimizer"));
    if (j.contains("grid")) {
      const auto& g = object_at(j, "grid");
      reject_unknown(g, {"resolution"}, "grid");
      c.grid_resolution = g.value("resolution", c.grid_resolution);
    }
    if (j.contains("output")) {
      const auto& o = object_at(j, "output");
      reject_unknown(o, {"path", "format"}, "output");
      c.output_path = o.value("path", c.output_path);
      c.format = o.value("format", c.format);
    }
    c.seed = j.value("seed", c.seed);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!c.format.empty() && c.format != "json" && c.format != "csv") {
    throw ConfigError("output.format must be \"csv\" or \"json\"");
  }
  if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (c.grid_resolution < 3) throw ConfigError("grid.resolution must be at least 3");
  return c;
}

json config_to_json(const RunConfig& c) {
  json j = {{"channel", c.channel},
            {"initial_state", {c.initial_state.x(), c.initial_state.y(), c.initial_state.z()}},
            {"eps", c.eps},
            {"natural_units", c.natural_units},
            {"integrator", integrator_to_json(c.integrator)},
            {"optimizer", optimizer_to_json(c.optimizer)},
            {"grid", {{"resolution", c.grid_resolution}}},
            {"output", {{"path", c.output_path}, {"format", c.format}}},
            {"seed", c.seed},
            {"jobs", c.jobs}};
  j["control"] = c.control ? to_json(*c.control) : json(nullptr);
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("configuration file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace bloch_relax::cli
