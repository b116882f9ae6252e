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
#include <vector>

namespace bloch_relax {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct NelderMeadOptions {
  double initial_step = 0.2;  // simplex edge along each coordinate
  double x_tol = 1e-8;        // stop when max_i |x_i - x_best|_inf falls below this
  long max_evals = 6000;      // hard cap, except that the initial simplex is always built
  bool operator==(const NelderMeadOptions&) const = default;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  long evaluations = 0;
  long iterations = 0;
  bool converged = false;  // true when stopped by x_tol rather than max_evals
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Bounded Nelder-Mead minimisation with reflection, expansion, contraction
/// and shrink coefficients (1, 2, 1/2, 1/2). Trial points are projected
/// coordinate-wise onto [lo + 1e-9, hi - 1e-9]; pass an empty `bounds` for an
/// unconstrained search. Throws NumericalError if f(x0) is not finite.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const std::vector<Interval>& bounds,
                             const NelderMeadOptions& opts = {});

}  // namespace bloch_relax
