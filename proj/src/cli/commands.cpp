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

#include "bloch_relax/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

#include <spdlog/spdlog.h>

#include "bloch_relax/analytic.hpp"
#include "bloch_relax/dynamics.hpp"
#include "bloch_relax/errors.hpp"
#include "bloch_relax/parallel.hpp"
#include "bloch_relax/weak_field.hpp"

namespace bloch_relax::cli {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json vec(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

// JSON has no infinity; unreachable times become null.
json time_json(double t, double unit) { return std::isfinite(t) ? json(t / unit) : json(nullptr); }

json worst_case_json(const analytic::WorstCase& w, double unit) {
  return {{"optimal", time_json(w.t_fast_max, unit)},
          {"free", time_json(w.t_free_max, unit)},
          {"ratio", std::isfinite(w.ratio()) ? json(w.ratio()) : json(nullptr)}};
}

json grid_json(const analytic::GridWorstCase& g, int resolution, double unit) {
  return {{"resolution", resolution},
          {"optimal", {{"time", time_json(g.fast.value, unit)}, {"state", vec(g.fast.argmax)}}},
          {"free", {{"time", time_json(g.free.value, unit)}, {"state", vec(g.free.argmax)}}},
          {"ratio", std::isfinite(g.ratio()) ? json(g.ratio()) : json(nullptr)}};
}

const char* regime_name(analytic::AdRegime r) {
  switch (r) {
    case analytic::AdRegime::cooling:
      return "cooling";
    case analytic::AdRegime::heating:
      return "heating";
    case analytic::AdRegime::within:
      break;
  }
  return "within_reach";
}

json weak_field_json(const analytic::WeakFieldReport& w, double unit) {
  return {{"T_bar", w.T_bar / unit},
          {"hitting_time", w.hitting_time / unit},
          {"slope_A", w.A / unit},
          {"slope_bound", w.A_bound / unit},
          {"endpoint_correction_D", w.D},
          {"gamma_integral", w.gamma_integral / unit},
          {"theta_initial", w.theta_i},
          {"theta_final", w.theta_bar},
          {"r_final", w.r_bar},
          {"bound_hypothesis_holds", w.bound_hypothesis}};
}

json ad_report(const RunConfig& cfg, const AmplitudeDamping& k, const BlochState& s) {
  const analytic::AdParams p{k.gamma, k.beta};
  const double unit = cfg.time_unit();
  const double eps = cfg.eps;
  const auto sc = to_spherical(s);
  const double t_free = analytic::t_free_ad(s, eps, p);
  const double t_fast = analytic::t_fast_ad(s, eps, p);
  json j = {{"r_fp", p.r_fp()},
            {"raising_rate", k.raising_rate()},
            {"lowering_rate", k.lowering_rate()},
            {"regime", regime_name(analytic::ad_regime(s.norm(), eps, p))},
            {"free_relaxation_time", t_free / unit},
            {"optimal_relaxation_time", t_fast / unit},
            {"speed_up", t_fast > 0.0 ? json(t_free / t_fast) : json(nullptr)},
            {"optimal_direction", vec(analytic::fast_direction_ad(s, eps, p))},
            {"purity_speed", analytic::v_ad(sc.r, sc.theta, p) * unit},
            {"optimal_cooling_speed", analytic::v_cool(sc.r, p) * unit},
            {"optimal_heating_speed", analytic::v_heat(sc.r, p) * unit},
            {"worst_case_leading_order", worst_case_json(analytic::worst_case_times_ad(eps, p), unit)},
            {"worst_case_grid",
             grid_json(analytic::grid_worst_case_ad(eps, p, cfg.grid_resolution, cfg.jobs),
                       cfg.grid_resolution, unit)}};
  j["stall_angle"] = s.norm() > 0.0 && s.norm() <= p.r_fp()
                         ? json(analytic::theta_stall(s.norm(), p))
                         : json(nullptr);
  if (cfg.control) {
    try {
      j["weak_field"] = weak_field_json(
          analytic::weak_field_report(s, eps, p, *cfg.absolute_control(), cfg.absolute_integrator()),
          unit);
    } catch (const Error& e) {
      j["weak_field"] = {{"error", e.what()}};
    }
  }
  return j;
}

json dp_report(const RunConfig& cfg, const Depolarizing& k, const BlochState& s) {
  const double unit = cfg.time_unit();
  const auto sc = to_spherical(s);
  const double t_free = analytic::t_free_dp(s, cfg.eps, k);
  const double t_fast = analytic::t_fast_dp(s, cfg.eps, k);
  return {{"contraction_rates", vec(k.big_gammas())},
          {"free_relaxation_time", time_json(t_free, unit)},
          {"optimal_relaxation_time", t_fast / unit},
          {"speed_up", t_fast > 0.0 && std::isfinite(t_free) ? json(t_free / t_fast) : json(nullptr)},
          {"optimal_axis", vec(analytic::fast_direction_dp(k))},
          {"control_useless", analytic::dp_control_useless(k)},
          {"purity_speed", analytic::v_dp(sc.r, sc.theta, sc.phi, k) * unit},
          {"worst_case_leading_order", worst_case_json(analytic::worst_case_times_dp(cfg.eps, k), unit)},
          {"worst_case_grid",
           grid_json(analytic::grid_worst_case_dp(cfg.eps, k, cfg.grid_resolution, cfg.jobs),
                     cfg.grid_resolution, unit)}};
}

json pd_report(const RunConfig& cfg, const PhaseDamping& k, const BlochState& s) {
  const double unit = cfg.time_unit();
  return {{"natural_fixed_point", vec(analytic::natural_fixed_point_pd(s))},
          {"free_relaxation_time", analytic::t_free_pd(s, cfg.eps, k.ghat) / unit},
          {"optimal_relaxation_time", analytic::t_fast_pd(s, cfg.eps, k.ghat) / unit},
          {"worst_case_leading_order",
           worst_case_json(analytic::worst_case_times_pd(cfg.eps, k.ghat), unit)}};
}

json generic_report(const LindbladChannel& ch, const BlochState& s, double unit) {
  const auto fps = fixed_points(ch);
  json dirs = json::array();
  for (const auto& d : fps.directions) dirs.push_back(vec(d));
  const auto k = coefficients(ch);
  auto cplx = [](std::complex<double> z) { return json{z.real(), z.imag()}; };
  return {{"fixed_point_base", vec(fps.base.vec())},
          {"fixed_point_directions", dirs},
          {"purity_speed", purity_speed(ch, s) * unit},
          {"coefficients",
           {{"a_plus", k.a_plus},
            {"a_minus", k.a_minus},
            {"b", k.b},
            {"c", cplx(k.c)},
            {"d_plus", cplx(k.d_plus)},
            {"d_minus", cplx(k.d_minus)}}}};
}

HittingProblem problem_from(const RunConfig& cfg, const char* command) {
  return {cfg.make_channel(), cfg.make_state(), cfg.eps, cfg.require_control(command),
          cfg.absolute_integrator()};
}

OptimizeSettings settings_from(const RunConfig& cfg) {
  return {cfg.optimizer.nelder_mead, cfg.jobs};
}

std::vector<OptimizeReport> run_sweep(const RunConfig& cfg, const char* command) {
  if (cfg.optimizer.m_values.empty()) {
    throw ConfigError(std::string(command) + " needs optimizer.m_values");
  }
  const auto problem = problem_from(cfg, command);
  std::vector<OptimizeReport> out;
  for (double m : cfg.optimizer.m_values) {
    spdlog::info("{}: optimising m = {} ({} restarts)", command, m, cfg.optimizer.restarts);
    out.push_back(optimize_T_m(m, problem, cfg.optimizer.restarts, cfg.seed, settings_from(cfg)));
    spdlog::info("{}: m = {} -> objective {}", command, m, out.back().objective);
  }
  return out;
}

}  // namespace

json cmd_analytic(const RunConfig& cfg) {
  const auto ch = cfg.make_channel();
  const auto s = cfg.make_state();
  const double unit = cfg.time_unit();
  const auto fps = fixed_points(ch);
  const BlochState target = BlochState::from_integrator(fps.project(s.vec()));
  json j = {{"channel", cfg.channel},
            {"initial_state", vec(s.vec())},
            {"eps", cfg.eps},
            {"time_unit", cfg.natural_units ? "1/rate" : "absolute"},
            {"purity", purity(s)},
            {"target_fixed_point", vec(target.vec())},
            {"trace_distance_to_target", trace_distance(s, target)}};
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, AmplitudeDamping>) {
          j["amplitude_damping"] = ad_report(cfg, k, s);
        } else if constexpr (std::is_same_v<K, Depolarizing>) {
          j["depolarizing"] = dp_report(cfg, k, s);
        } else if constexpr (std::is_same_v<K, PhaseDamping>) {
          j["phase_damping"] = pd_report(cfg, k, s);
        } else {
          j["generic"] = generic_report(ch, s, unit);
        }
      },
      ch.kind());
  return j;
}

std::string cmd_sweep_grid(const RunConfig& cfg, int resolution) {
  if (resolution < 16) {
    throw ConfigError("sweep-grid needs a resolution of at least 16");
  }
  const auto ch = cfg.make_channel();
  if (std::holds_alternative<GenericChannel>(ch.kind())) {
    throw ConfigError("sweep-grid needs a channel with closed-form times");
  }
  const double unit = cfg.time_unit();
  const auto n = static_cast<std::size_t>(resolution);
  std::vector<std::string> rows(n);
  parallel_chunks(n, cfg.jobs, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double x = -1.0 + 2.0 * static_cast<double>(i) / (resolution - 1);
      std::string& row = rows[i];
      for (int k = 0; k < resolution; ++k) {
        const double z = -1.0 + 2.0 * static_cast<double>(k) / (resolution - 1);
        Vec3 r(x, 0.0, z);
        if (r.norm() > 1.0 + 1e-12) continue;
        if (r.norm() > 1.0) r.normalize();
        const BlochState s(r);
        const double t_free = analytic::analytic_free_time(ch, s, cfg.eps);
        const double t_fast = analytic::analytic_fast_time(ch, s, cfg.eps);
        row += num(r.x()) + ',' + num(r.z()) + ',' + num(t_free / unit) + ',' +
               num(t_fast / unit) + '\n';
      }
    }
  });
  std::string out = "r_x,r_z,T_free,T_fast\n";
  for (const auto& r : rows) out += r;
  return out;
}

std::string cmd_simulate(const RunConfig& cfg) {
  const auto ch = cfg.make_channel();
  const auto s0 = cfg.make_state();
  const auto integ = cfg.absolute_integrator();
  const auto control = cfg.absolute_control();
  if (control && integ.t_max > control->tau) {
    throw ConfigError("simulate: integrator.t_max exceeds the control horizon tau");
  }
  const ControlField field = control ? make_field(*control) : zero_field();
  const auto traj = evolve(ch, field, s0, integ);
  const double unit = cfg.time_unit();
  const auto target = BlochState::from_integrator(fixed_points(ch).project(s0.vec()));

  if (cfg.format == "csv") {
    std::string out = "t,r_x,r_y,r_z,purity\n";
    for (const auto& p : traj.samples()) {
      out += num(p.t / unit) + ',' + num(p.state.x()) + ',' + num(p.state.y()) + ',' +
             num(p.state.z()) + ',' + num(purity(p.state)) + '\n';
    }
    return out;
  }
  json samples = json::array();
  for (const auto& p : traj.samples()) {
    samples.push_back({{"t", p.t / unit}, {"r", vec(p.state.vec())}, {"purity", purity(p.state)}});
  }
  const auto& st = traj.stats();
  const auto hit = time_to_ball(ch, field, s0, target, cfg.eps, integ);
  json j = {{"terminal_reason", to_string(traj.reason())},
            {"final_state", vec(traj.final_state().vec())},
            {"target_fixed_point", vec(target.vec())},
            {"final_distance_to_target", (traj.final_state().vec() - target.vec()).norm()},
            {"hitting_time", hit ? json(*hit / unit) : json(nullptr)},
            {"stats",
             {{"accepted", st.accepted}, {"rejected", st.rejected}, {"rhs_evals", st.rhs_evals}}},
            {"samples", samples}};
  return j.dump(2) + '\n';
}

OptimizeReport optimize_from_config(const RunConfig& cfg, double m) {
  return optimize_T_m(m, problem_from(cfg, "optimize"), cfg.optimizer.restarts, cfg.seed,
                      settings_from(cfg));
}

json cmd_optimize(const RunConfig& cfg, double m) {
  const auto report = optimize_from_config(cfg, m);
  json j = to_json(report);
  const double unit = cfg.time_unit();
  auto scale = [&](json& v) {
    if (v.is_number()) v = v.get<double>() / unit;
  };
  scale(j["T_m"]);
  scale(j["objective"]);
  for (auto& o : j["outcomes"]) {
    scale(o["hitting_time"]);
    scale(o["objective"]);
  }
  j["time_unit"] = cfg.natural_units ? "1/rate" : "absolute";
  j["T_fast_analytic"] = time_json(
      analytic::analytic_fast_time(cfg.make_channel(), cfg.make_state(), cfg.eps), unit);
  return j;
}

std::string cmd_sweep(const RunConfig& cfg) {
  const auto reports = run_sweep(cfg, "sweep");
  const double unit = cfg.time_unit();
  const double t_fast = analytic::analytic_fast_time(cfg.make_channel(), cfg.make_state(), cfg.eps);
  std::vector<double> objectives;
  for (const auto& r : reports) objectives.push_back(r.objective);
  const auto envelope = running_minimum(objectives);

  if (cfg.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      rows.push_back({{"m", r.m},
                      {"T_m", r.T_m ? json(*r.T_m / unit) : json(nullptr)},
                      {"T_fast_analytic", time_json(t_fast, unit)},
                      {"objective", r.objective / unit},
                      {"envelope", envelope[i] / unit}});
    }
    return json{{"sweep", rows}}.dump(2) + '\n';
  }
  std::string out = "m,T_m,T_fast_analytic,objective,envelope\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out += num(r.m) + ',' + (r.T_m ? num(*r.T_m / unit) : std::string("nan")) + ',' +
           num(t_fast / unit) + ',' + num(r.objective / unit) + ',' + num(envelope[i] / unit) +
           '\n';
  }
  return out;
}

SlopeOutput cmd_slope(const RunConfig& cfg) {
  const auto reports = run_sweep(cfg, "slope");
  const double unit = cfg.time_unit();
  SlopeOutput out;
  out.csv = "m,T_m\n";
  std::vector<std::pair<double, double>> points;
  for (const auto& r : reports) {
    out.csv += num(r.m) + ',' + (r.T_m ? num(*r.T_m / unit) : std::string("nan")) + '\n';
    if (r.T_m) points.emplace_back(r.m, *r.T_m / unit);
  }
  const auto fit = fit_slope(points);
  out.summary = {{"T_bar_fit", fit.T_bar},
                 {"A_fit", fit.A},
                 {"r_squared", fit.r_squared},
                 {"points", fit.points},
                 {"time_unit", cfg.natural_units ? "1/rate" : "absolute"}};
  const auto ch = cfg.make_channel();
  if (const auto* ad = std::get_if<AmplitudeDamping>(&ch.kind())) {
    try {
      const auto w = analytic::weak_field_report(cfg.make_state(), cfg.eps, {ad->gamma, ad->beta},
                                                 cfg.require_control("slope"),
                                                 cfg.absolute_integrator());
      out.summary["T_bar_quadrature"] = w.T_bar / unit;
      out.summary["A_bound"] = w.A_bound / unit;
      out.summary["endpoint_correction_D"] = w.D;
      out.summary["bound_hypothesis_holds"] = w.bound_hypothesis;
      out.summary["A_within_bound"] = fit.A <= w.A_bound / unit + 1e-9;
    } catch (const DomainError& e) {
      out.summary["weak_field_error"] = e.what();
    }
  }
  return out;
}

}  // namespace bloch_relax::cli
