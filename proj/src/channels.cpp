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

#include "bloch_relax/channels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "bloch_relax/errors.hpp"

namespace bloch_relax {

namespace {

constexpr double kOrthonormalTol = 1e-12;
constexpr double kRankTol = 1e-10;
const std::complex<double> kI(0.0, 1.0);

Vec3c cross(const Vec3c& a, const Vec3c& b) {
  return Vec3c(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

// l . conj(m), the orthonormality pairing.
std::complex<double> pair(const Vec3c& l, const Vec3c& m) {
  return l(0) * std::conj(m(0)) + l(1) * std::conj(m(1)) + l(2) * std::conj(m(2));
}

void require_rate(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw DomainError(std::string(name) + " must be a finite non-negative rate");
  }
}

}  // namespace

double AmplitudeDamping::fixed_point_radius() const { return std::tanh(0.5 * beta); }

double AmplitudeDamping::raising_rate() const { return gamma / std::expm1(beta); }

double AmplitudeDamping::lowering_rate() const {
  return gamma * std::exp(beta) / std::expm1(beta);
}

LindbladChannel::LindbladChannel(std::vector<LindbladTerm> terms, ChannelKind kind)
    : terms_(std::move(terms)), kind_(kind) {
  if (terms_.size() > 3) {
    throw DomainError("a qubit dissipator needs at most three Lindblad operators");
  }
  for (const auto& t : terms_) {
    require_rate(t.rate, "Lindblad rate");
    if (!t.l.allFinite()) {
      throw DomainError("Lindblad vector has non-finite components");
    }
  }
  for (std::size_t a = 0; a < terms_.size(); ++a) {
    for (std::size_t b = 0; b < terms_.size(); ++b) {
      const auto expected = a == b ? 1.0 : 0.0;
      if (std::abs(pair(terms_[a].l, terms_[b].l) - expected) > kOrthonormalTol) {
        throw DomainError("Lindblad vectors must satisfy l_a . conj(l_b) = delta_ab");
      }
    }
  }

  for (const auto& t : terms_) {
    const Eigen::Matrix3cd outer = t.l.conjugate() * t.l.transpose();  // (i, j) = conj(l_i) l_j
    linear_ += 2.0 * t.rate * (outer.real() - Mat3::Identity());
    offset_ += 2.0 * t.rate * (kI * cross(t.l, t.l.conjugate())).real();
  }
}

double LindbladChannel::reference_rate() const {
  double best = 0.0;
  for (const auto& t : terms_) best = std::max(best, t.rate);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, AmplitudeDamping>) {
          return k.gamma;
        } else if constexpr (std::is_same_v<K, Depolarizing>) {
          return std::max({k.gx, k.gy, k.gz});
        } else if constexpr (std::is_same_v<K, PhaseDamping>) {
          return k.ghat;
        } else {
          return best;
        }
      },
      kind_);
}

LindbladChannel amplitude_damping(double gamma, double beta) {
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    throw DomainError("amplitude damping needs gamma > 0");
  }
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw DomainError("amplitude damping needs beta > 0 (beta = 0 makes the rates diverge)");
  }
  const AmplitudeDamping kind{gamma, beta};
  const double s = 1.0 / std::sqrt(2.0);
  // (l . sigma) = sqrt(2) sigma_+ for l = (1, i, 0)/sqrt(2).
  const Vec3c up(s, kI * s, 0.0);
  const Vec3c down(s, -kI * s, 0.0);
  return LindbladChannel({{0.5 * kind.raising_rate(), up}, {0.5 * kind.lowering_rate(), down}},
                         kind);
}

LindbladChannel depolarizing(double gx, double gy, double gz) {
  require_rate(gx, "gamma_x");
  require_rate(gy, "gamma_y");
  require_rate(gz, "gamma_z");
  if (gx + gy + gz <= 0.0) {
    throw DomainError("depolarizing channel needs at least one positive rate");
  }
  return LindbladChannel({{gx, Vec3c(1.0, 0.0, 0.0)},
                          {gy, Vec3c(0.0, 1.0, 0.0)},
                          {gz, Vec3c(0.0, 0.0, 1.0)}},
                         Depolarizing{gx, gy, gz});
}

LindbladChannel phase_damping(double ghat) {
  if (!std::isfinite(ghat) || ghat <= 0.0) {
    throw DomainError("phase damping needs a positive rate");
  }
  return LindbladChannel({{ghat, Vec3c(0.0, 0.0, 1.0)}}, PhaseDamping{ghat});
}

Vec3 dissipator_velocity(const LindbladChannel& ch, const BlochState& s) {
  return ch.velocity(s.vec());
}

Vec3 FixedPointSet::project(const Vec3& s) const {
  Vec3 p = base.vec();
  for (const auto& d : directions) {
    p += d * d.dot(s - base.vec());
  }
  return p;
}

FixedPointSet fixed_points(const LindbladChannel& ch) {
  const Mat3& m = ch.linear_part();
  const Vec3 rhs = -ch.offset();
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  const double cutoff = kRankTol * std::max(1.0, sigma(0));

  Vec3 solution = Vec3::Zero();
  std::vector<Vec3> directions;
  const Vec3 projected = svd.matrixU().transpose() * rhs;
  for (int i = 0; i < 3; ++i) {
    if (sigma(i) > cutoff) {
      solution += svd.matrixV().col(i) * (projected(i) / sigma(i));
    } else {
      directions.emplace_back(svd.matrixV().col(i));
    }
  }
  if ((m * solution - rhs).norm() > kRankTol * std::max(1.0, rhs.norm())) {
    throw DomainError("dissipator has no fixed point: stationary equations are inconsistent");
  }
  if (solution.norm() > 1.0 + kStateTolerance) {
    throw DomainError("dissipator has no fixed point inside the Bloch ball");
  }
  // Canonical orientation for a readable report: first nonzero component positive.
  for (auto& d : directions) {
    for (int i = 0; i < 3; ++i) {
      if (std::abs(d(i)) > 1e-12) {
        if (d(i) < 0.0) d = -d;
        break;
      }
    }
  }
  return {BlochState(solution), std::move(directions)};
}

DissipatorCoefficients coefficients(const LindbladChannel& ch) {
  DissipatorCoefficients k;
  for (const auto& t : ch.terms()) {
    const auto lp = t.l(0) + kI * t.l(1);
    const auto lm = t.l(0) - kI * t.l(1);
    const auto lz = t.l(2);
    k.a_plus += t.rate * std::norm(lp);
    k.a_minus += t.rate * std::norm(lm);
    k.b += t.rate * (1.0 + std::norm(lz));
    k.c += t.rate * std::conj(lp) * lm;
    k.d_plus += t.rate * std::conj(lp) * lz;
    k.d_minus += t.rate * std::conj(lm) * lz;
  }
  return k;
}

double purity_speed(const DissipatorCoefficients& k, const SphericalCoords& c) {
  const double r = c.r;
  const auto e1 = std::polar(1.0, c.phi);
  const auto e2 = std::polar(1.0, 2.0 * c.phi);
  const double ce2 = std::real(k.c * e2);
  const double linear = -(k.a_plus - k.a_minus) * std::cos(c.theta) +
                        2.0 * std::real((k.d_plus - std::conj(k.d_minus)) * e1) * std::sin(c.theta);
  const double quadratic = -(k.b + k.a_plus + k.a_minus) + ce2 +
                           (k.b - k.a_plus - k.a_minus - ce2) * std::cos(2.0 * c.theta) +
                           2.0 * std::real((k.d_plus + std::conj(k.d_minus)) * e1) *
                               std::sin(2.0 * c.theta);
  return r * (linear + 0.5 * r * quadratic);
}

double purity_speed(const LindbladChannel& ch, const BlochState& s) {
  return purity_speed(coefficients(ch), to_spherical(s));
}

LindbladChannel channel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ConfigError("channel specification needs a \"kind\" field");
  }
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "amplitude_damping") {
      return amplitude_damping(j.at("gamma").get<double>(), j.at("beta").get<double>());
    }
    if (kind == "depolarizing") {
      return depolarizing(j.value("gx", 0.0), j.value("gy", 0.0), j.value("gz", 0.0));
    }
    if (kind == "phase_damping") {
      return phase_damping(j.at("ghat").get<double>());
    }
    if (kind == "generic") {
      std::vector<LindbladTerm> terms;
      for (const auto& t : j.at("terms")) {
        LindbladTerm term;
        term.rate = t.at("rate").get<double>();
        const auto& l = t.at("l");
        if (!l.is_array() || l.size() != 3) {
          throw ConfigError("generic channel term needs \"l\" with three [re, im] entries");
        }
        for (int i = 0; i < 3; ++i) {
          const auto& e = l.at(i);
          term.l(i) = e.is_array() ? std::complex<double>(e.at(0).get<double>(), e.at(1).get<double>())
                                   : std::complex<double>(e.get<double>(), 0.0);
        }
        terms.push_back(term);
      }
      return LindbladChannel(std::move(terms));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid " + kind + " channel specification: " + e.what());
  }
  throw ConfigError("unknown channel kind \"" + kind + "\"");
}

nlohmann::json channel_to_json(const LindbladChannel& ch) {
  return std::visit(
      [&](const auto& k) -> nlohmann::json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, AmplitudeDamping>) {
          return {{"kind", "amplitude_damping"}, {"gamma", k.gamma}, {"beta", k.beta}};
        } else if constexpr (std::is_same_v<K, Depolarizing>) {
          return {{"kind", "depolarizing"}, {"gx", k.gx}, {"gy", k.gy}, {"gz", k.gz}};
        } else if constexpr (std::is_same_v<K, PhaseDamping>) {
          return {{"kind", "phase_damping"}, {"ghat", k.ghat}};
        } else {
          nlohmann::json terms = nlohmann::json::array();
          for (const auto& t : ch.terms()) {
            nlohmann::json l = nlohmann::json::array();
            for (int i = 0; i < 3; ++i) l.push_back({t.l(i).real(), t.l(i).imag()});
            terms.push_back({{"rate", t.rate}, {"l", l}});
          }
          return {{"kind", "generic"}, {"terms", terms}};
        }
      },
      ch.kind());
}

}  // namespace bloch_relax
