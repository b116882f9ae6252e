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

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/QR>

#include "bloch_relax/bloch.hpp"
#include "bloch_relax/channels.hpp"

namespace test_support {

using bloch_relax::BlochState;
using bloch_relax::LindbladChannel;
using bloch_relax::LindbladTerm;
using bloch_relax::Vec3;
using Mat2c = Eigen::Matrix2cd;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Vec3 random_direction() {
  std::normal_distribution<double> n;
  Vec3 v;
  do {
    v = Vec3(n(rng()), n(rng()), n(rng()));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

/// Uniform in the ball, radius in [r_min, r_max].
inline BlochState random_state(double r_min = 0.0, double r_max = 1.0) {
  const double u = uniform(std::pow(r_min, 3), std::pow(r_max, 3));
  return BlochState(std::cbrt(u) * random_direction());
}

inline BlochState random_state_with_radius(double r) { return BlochState(r * random_direction()); }

/// Up to three orthonormal complex l-vectors from a random unitary, random rates.
inline LindbladChannel random_generic_channel(int terms) {
  std::normal_distribution<double> n;
  Eigen::Matrix3cd a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = {n(rng()), n(rng())};
  Eigen::HouseholderQR<Eigen::Matrix3cd> qr(a);
  const Eigen::Matrix3cd q = qr.householderQ();
  std::vector<LindbladTerm> out;
  for (int k = 0; k < terms; ++k) {
    LindbladTerm t;
    t.rate = uniform(0.05, 2.0);
    // Columns of a unitary: sum_i q_ia conj(q_ib) = delta_ab.
    t.l = q.col(k);
    out.push_back(t);
  }
  return LindbladChannel(std::move(out));
}

// ---------------------------------------------------------------------------
// Independent density-matrix oracle: rho = (I + r.sigma)/2, L = sqrt(rate) l.sigma,
// rho' = -i[h.sigma, rho] + sum L rho L^+ - {L^+ L, rho}/2, r_i = Tr(sigma_i rho').

inline const std::array<Mat2c, 3>& paulis() {
  static const std::array<Mat2c, 3> s = [] {
    const std::complex<double> i(0.0, 1.0);
    Mat2c x, y, z;
    x << 0, 1, 1, 0;
    y << 0, -i, i, 0;
    z << 1, 0, 0, -1;
    return std::array<Mat2c, 3>{x, y, z};
  }();
  return s;
}

inline Mat2c dot_sigma(const Eigen::Vector3cd& v) {
  const auto& s = paulis();
  return v(0) * s[0] + v(1) * s[1] + v(2) * s[2];
}

inline Mat2c density(const Vec3& r) {
  return 0.5 * (Mat2c::Identity() + dot_sigma(r.cast<std::complex<double>>()));
}

inline Vec3 oracle_velocity(const LindbladChannel& ch, const Vec3& h, const Vec3& r) {
  const std::complex<double> i(0.0, 1.0);
  const Mat2c rho = density(r);
  const Mat2c H = dot_sigma(h.cast<std::complex<double>>());
  Mat2c drho = -i * (H * rho - rho * H);
  for (const auto& t : ch.terms()) {
    const Mat2c L = std::sqrt(t.rate) * dot_sigma(t.l);
    const Mat2c Ld = L.adjoint();
    drho += L * rho * Ld - 0.5 * (Ld * L * rho + rho * Ld * L);
  }
  Vec3 v;
  for (int k = 0; k < 3; ++k) v(k) = (paulis()[k] * drho).trace().real();
  return v;
}

}  // namespace test_support
