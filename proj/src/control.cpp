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

#include "bloch_relax/control.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "bloch_relax/errors.hpp"

namespace bloch_relax {

namespace {

constexpr double kHorizonSlack = 1e-12;

Vec3 shape_unchecked(const CrabControl& c, double t) {
  Vec3 h = Vec3::Zero();
  if (c.coeffs.empty()) return h;
  // sin(n x) by the Chebyshev recurrence sin((n+1)x) = 2 cos x sin(nx) - sin((n-1)x).
  const double x = 2.0 * std::numbers::pi * t / c.tau;
  const double two_cos = 2.0 * std::cos(x);
  double prev = 0.0;
  double cur = std::sin(x);
  for (int n = 0; n < c.n_modes; ++n) {
    const double* row = c.coeffs.data() + 3 * n;
    h += cur * Vec3(row[0], row[1], row[2]);
    const double next = two_cos * cur - prev;
    prev = cur;
    cur = next;
  }
  h *= t / (c.tau * c.n_modes);
  const double n = h.norm();
  return n > 1.0 ? Vec3(h / n) : h;
}

Vec3 field_unchecked(const CrabControl& c, double t) {
  Vec3 h = drift_field(c, t);
  if (c.m != 0.0) h += c.m * shape_unchecked(c, t);
  return h;
}

}  // namespace

void CrabControl::validate() const {
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw DomainError("control horizon tau must be positive");
  }
  if (n_modes < 1) {
    throw DomainError("control needs at least one Fourier mode");
  }
  if (!std::isfinite(m) || m < 0.0) {
    throw DomainError("control bound m must be non-negative");
  }
  if (!std::isfinite(omega)) {
    throw DomainError("drift frequency omega must be finite");
  }
  if (!coeffs.empty() && coeffs.size() != dimension()) {
    throw DomainError("control needs 3 coefficients per mode (" + std::to_string(dimension()) +
                      "), got " + std::to_string(coeffs.size()));
  }
  for (double v : coeffs) {
    if (!(std::abs(v) <= 1.0)) {
      throw DomainError("control coefficients must lie in [-1, 1]");
    }
  }
}

Vec3 drift_field(const CrabControl& c, double t) {
  Vec3 h(0.0, 0.0, 0.5 * c.omega);
  if (c.drift_ramp) h += Vec3::Constant(t / c.tau);
  return h;
}

Vec3 control_shape(const CrabControl& c, double t) { return shape_unchecked(c, t); }

Vec3 control_field(const CrabControl& c, double t) {
  if (!(t >= -kHorizonSlack * c.tau && t <= c.tau * (1.0 + kHorizonSlack))) {
    throw DomainError("control field requested outside its horizon [0, tau]");
  }
  return field_unchecked(c, t);
}

ControlField make_field(CrabControl c) {
  c.validate();
  return [c = std::move(c)](double t) { return control_field(c, t); };
}

nlohmann::json to_json(const CrabControl& c) {
  return {{"coeffs", c.coeffs}, {"tau", c.tau},     {"n_modes", c.n_modes},
          {"m", c.m},           {"omega", c.omega}, {"drift_ramp", c.drift_ramp}};
}

CrabControl crab_from_json(const nlohmann::json& j) {
  CrabControl c;
  try {
    c.coeffs = j.value("coeffs", std::vector<double>{});
    c.tau = j.value("tau", c.tau);
    c.n_modes = j.value("n_modes", c.n_modes);
    c.m = j.value("m", c.m);
    c.omega = j.at("omega").get<double>();
    c.drift_ramp = j.value("drift_ramp", c.drift_ramp);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid control specification: ") + e.what());
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

}  // namespace bloch_relax
