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

#include "bloch_relax/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "bloch_relax/dynamics.hpp"
#include "bloch_relax/errors.hpp"
#include "bloch_relax/parallel.hpp"

namespace bloch_relax {

BlochState HittingProblem::target() const {
  return BlochState::from_integrator(fixed_points(channel).project(s0.vec()));
}

HittingOutcome hitting_time_outcome(const CrabControl& c, const LindbladChannel& ch,
                                    const BlochState& s0, const BlochState& target, double eps,
                                    IntegratorConfig cfg) {
  cfg.t_max = c.tau;
  const Vec3 center = target.vec();
  auto hit = first_hit(ch, make_field(c), s0,
                       [&](double, const Vec3& r) { return (r - center).norm() - eps; }, cfg);
  if (hit.time) return {*hit.time, hit.time};
  return {c.tau + (hit.trajectory.final_state().vec() - center).norm(), std::nullopt};
}

double hitting_time_objective(const CrabControl& c, const LindbladChannel& ch,
                              const BlochState& s0, double eps, const IntegratorConfig& cfg) {
  if (!(eps > 0.0)) {
    throw DomainError("ball radius eps must be positive");
  }
  const auto target = BlochState::from_integrator(fixed_points(ch).project(s0.vec()));
  return hitting_time_outcome(c, ch, s0, target, eps, cfg).objective;
}

OptimizeReport optimize_T_m(double m, const HittingProblem& problem, int restarts,
                            std::uint64_t seed, const OptimizeSettings& settings) {
  if (!std::isfinite(m) || m < 0.0) {
    throw DomainError("control bound m must be non-negative");
  }
  if (restarts < 1) {
    throw DomainError("optimizer needs at least one restart");
  }
  if (!(problem.eps > 0.0)) {
    throw DomainError("ball radius eps must be positive");
  }
  CrabControl base = problem.control;
  base.m = m;
  base.coeffs.clear();
  base.validate();
  const auto target = problem.target();
  const std::size_t dim = base.dimension();
  const std::vector<Interval> box(dim, Interval{-1.0, 1.0});

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
  parallel_chunks(outcomes.size(), settings.jobs, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(k)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> uniform(-1.0, 1.0);
      std::vector<double> start(dim);
      for (double& v : start) v = uniform(rng);

      CrabControl c = base;
      auto outcome = [&](const std::vector<double>& x) {
        c.coeffs = x;
        return hitting_time_outcome(c, problem.channel, problem.s0, target, problem.eps,
                                    problem.integrator);
      };

      RestartOutcome& o = outcomes[k];
      o.index = static_cast<int>(k);
      o.start = start;
      if (m == 0.0) {
        // The field no longer depends on the coefficients.
        o.coeffs = start;
        o.evaluations = 1;
        o.converged = true;
      } else {
        const auto nm = nelder_mead([&](const std::vector<double>& x) { return outcome(x).objective; },
                                    start, box, settings.nelder_mead);
        o.coeffs = nm.x;
        o.evaluations = nm.evaluations;
        o.converged = nm.converged;
      }
      const auto h = outcome(o.coeffs);
      o.objective = h.objective;
      o.hitting_time = h.hitting_time;
    }
  });

  OptimizeReport report;
  report.m = m;
  report.restarts = restarts;
  report.seed = seed;
  std::size_t best = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    report.evaluations += outcomes[k].evaluations;
    if (outcomes[k].objective < outcomes[best].objective) best = k;
  }
  report.best_restart = static_cast<int>(best);
  report.best_coeffs = outcomes[best].coeffs;
  report.objective = outcomes[best].objective;
  report.T_m = outcomes[best].hitting_time;
  report.outcomes = std::move(outcomes);
  return report;
}

std::vector<OptimizeReport> sweep_m(const std::vector<double>& ms, const HittingProblem& problem,
                                    int restarts, std::uint64_t seed,
                                    const OptimizeSettings& settings) {
  if (!std::is_sorted(ms.begin(), ms.end())) {
    throw DomainError("m values of a sweep must be sorted ascending");
  }
  std::vector<OptimizeReport> out;
  out.reserve(ms.size());
  for (double m : ms) out.push_back(optimize_T_m(m, problem, restarts, seed, settings));
  return out;
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& m_and_T) {
  const std::size_t n = m_and_T.size();
  if (n < 3) {
    throw DomainError("slope fit needs at least three (m, T_m) points");
  }
  const auto [lo, hi] = std::minmax_element(
      m_and_T.begin(), m_and_T.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (lo->first == hi->first) {
    throw DomainError("slope fit needs at least two distinct m values");
  }
  double mean_m = 0.0, mean_t = 0.0;
  for (const auto& [m, t] : m_and_T) {
    mean_m += m;
    mean_t += t;
  }
  mean_m /= n;
  mean_t /= n;
  double smm = 0.0, smt = 0.0, stt = 0.0;
  for (const auto& [m, t] : m_and_T) {
    smm += (m - mean_m) * (m - mean_m);
    smt += (m - mean_m) * (t - mean_t);
    stt += (t - mean_t) * (t - mean_t);
  }
  const double slope = smt / smm;
  SlopeFit fit;
  fit.A = -slope;
  fit.T_bar = mean_t - slope * mean_m;
  fit.r_squared = stt == 0.0 ? 1.0 : (smt * smt) / (smm * stt);
  fit.points = n;
  return fit;
}

std::vector<double> running_minimum(const std::vector<double>& values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(out.empty() ? v : std::min(out.back(), v));
  return out;
}

namespace {

nlohmann::json optional_time(const std::optional<double>& t) {
  return t ? nlohmann::json(*t) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const OptimizeReport& r) {
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : r.outcomes) {
    outcomes.push_back({{"index", o.index},
                        {"objective", o.objective},
                        {"hitting_time", optional_time(o.hitting_time)},
                        {"evaluations", o.evaluations},
                        {"converged", o.converged},
                        {"start", o.start},
                        {"coeffs", o.coeffs}});
  }
  return {{"m", r.m},
          {"T_m", optional_time(r.T_m)},
          {"reached", r.T_m.has_value()},
          {"objective", r.objective},
          {"best_coeffs", r.best_coeffs},
          {"best_restart", r.best_restart},
          {"evaluations", r.evaluations},
          {"restarts", r.restarts},
          {"seed", r.seed},
          {"outcomes", outcomes}};
}

}  // namespace bloch_relax
