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

// bloch-relax: relaxation times and bounded control on the Bloch ball.
//
//   bloch-relax analytic   --config run.json
//   bloch-relax simulate   --config run.json --format csv --out traj.csv
//   bloch-relax optimize   --config run.json --m 2 --restarts 16 --seed 7
//   bloch-relax sweep      --config run.json --jobs 4
//   bloch-relax sweep-grid --config run.json --resolution 201
//   bloch-relax slope      --config run.json
//
// Exit status: 0 success, 2 configuration or domain error, 3 numerical
// failure, 1 anything else. Errors are written to stderr as JSON.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "bloch_relax/cli/commands.hpp"
#include "bloch_relax/cli/config.hpp"
#include "bloch_relax/errors.hpp"

namespace {

using bloch_relax::cli::RunConfig;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("bloch-relax");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("BLOCH_RELAX_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

int fail(int code, const std::string& kind, const std::string& message) {
  const nlohmann::json err = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bloch_relax::ConfigError("cannot open output file " + path);
  out << text;
  spdlog::info("wrote {}", path);
}

std::string format_or(const RunConfig& cfg, const char* fallback) {
  return cfg.format.empty() ? fallback : cfg.format;
}

void require_format(const RunConfig& cfg, const char* command, const char* only) {
  if (!cfg.format.empty() && cfg.format != only) {
    throw bloch_relax::ConfigError(std::string(command) + " only emits " + only);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Relaxation times and bounded control of a qubit on the Bloch ball", "bloch-relax"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool natural_units = false;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "optimizer seed");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--natural-units", natural_units, "times in units of 1/rate");

  auto* analytic = app.add_subcommand("analytic", "closed-form times, speeds and worst cases (JSON)");
  auto* simulate = app.add_subcommand("simulate", "integrate the controlled master equation");
  auto* optimize = app.add_subcommand("optimize", "minimise the hitting time at one field bound m");
  auto* sweep = app.add_subcommand("sweep", "optimise over optimizer.m_values (m, T_m, T_fast)");
  auto* sweep_grid = app.add_subcommand("sweep-grid", "T_free and T_fast over the y = 0 plane (CSV)");
  auto* slope = app.add_subcommand("slope", "small-m sweep with a linear fit and its bound");

  std::optional<double> m;
  std::optional<int> restarts;
  int resolution = 0;
  optimize->add_option("--m", m, "field bound m (default: control.m)")->check(CLI::NonNegativeNumber);
  optimize->add_option("--restarts", restarts, "Nelder-Mead restarts")->check(CLI::PositiveNumber);
  sweep->add_option("--restarts", restarts, "Nelder-Mead restarts")->check(CLI::PositiveNumber);
  slope->add_option("--restarts", restarts, "Nelder-Mead restarts")->check(CLI::PositiveNumber);
  sweep_grid->add_option("--resolution", resolution, "points per axis (>= 16)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "usage", e.what());
  }

  try {
    RunConfig cfg = bloch_relax::cli::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (restarts) cfg.optimizer.restarts = *restarts;
    if (!format.empty()) cfg.format = format;
    if (natural_units) cfg.natural_units = true;
    const std::string out = out_path.empty() ? cfg.output_path : out_path;

    if (*analytic) {
      require_format(cfg, "analytic", "json");
      emit(bloch_relax::cli::cmd_analytic(cfg).dump(2) + '\n', out);
    } else if (*simulate) {
      if (cfg.format.empty()) cfg.format = "csv";
      emit(bloch_relax::cli::cmd_simulate(cfg), out);
    } else if (*optimize) {
      require_format(cfg, "optimize", "json");
      const double bound = m ? *m : (cfg.control ? cfg.control->m : 0.0);
      emit(bloch_relax::cli::cmd_optimize(cfg, bound).dump(2) + '\n', out);
    } else if (*sweep) {
      if (cfg.format.empty()) cfg.format = "csv";
      emit(bloch_relax::cli::cmd_sweep(cfg), out);
    } else if (*sweep_grid) {
      require_format(cfg, "sweep-grid", "csv");
      emit(bloch_relax::cli::cmd_sweep_grid(cfg, resolution > 0 ? resolution : cfg.grid_resolution),
           out);
    } else if (*slope) {
      const auto result = bloch_relax::cli::cmd_slope(cfg);
      if (format_or(cfg, "json") == "json") {
        emit(nlohmann::json{{"fit", result.summary}, {"csv", result.csv}}.dump(2) + '\n', out);
      } else {
        emit(result.csv, out);
        const std::string fit = result.summary.dump(2) + '\n';
        if (out.empty()) {
          std::cerr << fit;
        } else {
          emit(fit, out + ".fit.json");
        }
      }
    }
  } catch (const bloch_relax::ConfigError& e) {
    return fail(2, "config", e.what());
  } catch (const bloch_relax::DomainError& e) {
    return fail(2, "domain", e.what());
  } catch (const bloch_relax::NumericalError& e) {
    return fail(3, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
  return 0;
}
