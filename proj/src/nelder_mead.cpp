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

#include "bloch_relax/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bloch_relax/errors.hpp"

namespace bloch_relax {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
constexpr double kBoundMargin = 1e-9;

struct Vertex {
  std::vector<double> x;
  double f = 0.0;
};

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const std::vector<Interval>& bounds, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) {
    throw DomainError("Nelder-Mead needs at least one variable");
  }
  if (!bounds.empty() && bounds.size() != n) {
    throw DomainError("Nelder-Mead bounds must match the number of variables");
  }
  if (!(opts.initial_step > 0.0) || !(opts.x_tol > 0.0) || opts.max_evals < 1) {
    throw DomainError("Nelder-Mead options must be positive");
  }

  auto project = [&](std::vector<double>& x) {
    if (bounds.empty()) return;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::clamp(x[i], bounds[i].lo + kBoundMargin, bounds[i].hi - kBoundMargin);
    }
  };

  NelderMeadResult res;
  auto eval = [&](std::vector<double> x) {
    project(x);
    const double v = f(x);
    ++res.evaluations;
    return Vertex{std::move(x), std::isnan(v) ? std::numeric_limits<double>::infinity() : v};
  };

  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(eval(x0));
  if (!std::isfinite(simplex.front().f)) {
    throw NumericalError("Nelder-Mead objective is not finite at the starting point");
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto x = simplex.front().x;
    double step = opts.initial_step;
    if (!bounds.empty() && x[i] + step > bounds[i].hi - kBoundMargin) step = -step;
    x[i] += step;
    simplex.push_back(eval(std::move(x)));
  }

  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        d = std::max(d, std::abs(simplex[k].x[i] - simplex[0].x[i]));
      }
    }
    return d;
  };
  auto along = [&](const std::vector<double>& c, const std::vector<double>& x, double t) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = c[i] + t * (x[i] - c[i]);
    return y;
  };

  order();
  std::vector<double> centroid(n);
  while (true) {
    if (diameter() < opts.x_tol) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= opts.max_evals) break;
    ++res.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].x[i];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    Vertex& worst = simplex[n];
    const double f_best = simplex[0].f;
    const double f_second = simplex[n - 1].f;

    auto budget_left = [&] { return res.evaluations < opts.max_evals; };
    Vertex reflected = eval(along(centroid, worst.x, -kReflect));
    if (reflected.f < f_best) {
      if (budget_left()) {
        Vertex expanded = eval(along(centroid, reflected.x, kExpand));
        worst = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
      } else {
        worst = std::move(reflected);
      }
    } else if (reflected.f < f_second) {
      worst = std::move(reflected);
    } else if (budget_left()) {
      bool accepted = false;
      if (reflected.f < worst.f) {
        Vertex outside = eval(along(centroid, reflected.x, kContract));
        if (outside.f <= reflected.f) {
          worst = std::move(outside);
          accepted = true;
        }
      } else {
        Vertex inside = eval(along(centroid, worst.x, kContract));
        if (inside.f < worst.f) {
          worst = std::move(inside);
          accepted = true;
        }
      }
      if (!accepted) {
        for (std::size_t k = 1; k <= n && budget_left(); ++k) {
          simplex[k] = eval(along(simplex[0].x, simplex[k].x, kShrink));
        }
      }
    }
    order();
  }

  res.x = simplex[0].x;
  res.f = simplex[0].f;
  return res;
}

}  // namespace bloch_relax
