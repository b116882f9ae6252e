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

#include "bloch_relax/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/Geometry>

#include "bloch_relax/errors.hpp"

namespace bloch_relax {

namespace {

constexpr int kEventSubsamples = 6;

void require_time(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError("time must be finite and non-negative");
  }
}

// Bisection on [lo, hi] with g(lo) > 0 >= g(hi), run until the bracket
// cannot shrink further in double precision.
template <class G>
double bisect(const G& g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

ControlField zero_field() {
  return [](double) { return Vec3::Zero().eval(); };
}

ControlField constant_field(const Vec3& h) {
  return [h](double) { return h; };
}

Vec3 bloch_rhs(const LindbladChannel& ch, const Vec3& h, const Vec3& r) {
  return 2.0 * h.cross(r) + ch.velocity(r);
}

const char* to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::horizon:
      return "horizon";
    case TerminalReason::ball_hit:
      return "ball_hit";
    case TerminalReason::stalled:
      return "stalled";
  }
  return "unknown";
}

Trajectory::Trajectory(BlochState initial, std::vector<DenseStep> steps, IntegrationStats stats,
                       TerminalReason reason, std::optional<double> t_stop)
    : steps_(std::move(steps)), stats_(stats), reason_(reason) {
  samples_.reserve(steps_.size() + 1);
  samples_.push_back({0.0, initial});
  for (const auto& s : steps_) {
    if (t_stop && s.t1() >= *t_stop) {
      if (*t_stop > samples_.back().t) {
        samples_.push_back({*t_stop, BlochState::from_integrator(s.at(*t_stop))});
      }
      break;
    }
    samples_.push_back({s.t1(), BlochState::from_integrator(s.end())});
  }
}

BlochState Trajectory::at(double t) const {
  const double slack = 1e-12 * std::max(1.0, t_end());
  if (!(t >= -slack && t <= t_end() + slack)) {
    throw DomainError("trajectory queried outside [0, t_end]");
  }
  if (steps_.empty() || t <= 0.0) {
    return samples_.front().state;
  }
  if (t >= t_end()) {
    return samples_.back().state;
  }
  const auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                                   [](double value, const DenseStep& s) { return value < s.t0; });
  const auto& step = *std::prev(it);
  return BlochState::from_integrator(step.at(t));
}

Trajectory evolve(const LindbladChannel& ch, const ControlField& field, const BlochState& s0,
                  const IntegratorConfig& cfg) {
  cfg.validate();
  std::vector<DenseStep> steps;
  auto rhs = [&](double t, const Vec3& r) { return bloch_rhs(ch, field(t), r); };
  const auto stats = integrate_dopri5(rhs, 0.0, s0.vec(), cfg.t_max, cfg, [&](const DenseStep& s) {
    steps.push_back(s);
    return true;
  });
  const Vec3 r_end = steps.empty() ? s0.vec() : steps.back().end();
  const double scale = std::max(1.0, ch.reference_rate());
  const auto reason = rhs(cfg.t_max, r_end).norm() < 1e-10 * scale ? TerminalReason::stalled
                                                                   : TerminalReason::horizon;
  return Trajectory(s0, std::move(steps), stats, reason);
}

HitResult first_hit(const LindbladChannel& ch, const ControlField& field, const BlochState& s0,
                    const EventFunction& g, const IntegratorConfig& cfg) {
  cfg.validate();
  HitResult result;
  if (g(0.0, s0.vec()) <= 0.0) {
    result.time = 0.0;
    result.trajectory = Trajectory(s0, {}, {}, TerminalReason::ball_hit);
    return result;
  }

  std::vector<DenseStep> steps;
  std::optional<double> hit;
  auto rhs = [&](double t, const Vec3& r) { return bloch_rhs(ch, field(t), r); };
  const auto stats = integrate_dopri5(rhs, 0.0, s0.vec(), cfg.t_max, cfg, [&](const DenseStep& s) {
    auto gs = [&](double t) { return g(t, s.at(t)); };
    double t_prev = s.t0;
    double best_g = std::numeric_limits<double>::infinity();
    double best_t = s.t0;
    for (int i = 1; i <= kEventSubsamples; ++i) {
      const double t = i == kEventSubsamples ? s.t1() : s.t0 + s.h * i / kEventSubsamples;
      const double v = gs(t);
      if (v <= 0.0) {
        hit = bisect(gs, t_prev, t);
        break;
      }
      if (v < best_g) {
        best_g = v;
        best_t = t;
      }
      t_prev = t;
    }
    if (!hit && best_g < kGrazingTol) {
      hit = best_t;
    }
    steps.push_back(s);
    return !hit;
  });
  result.time = hit;
  result.trajectory = Trajectory(s0, std::move(steps), stats,
                                 hit ? TerminalReason::ball_hit : TerminalReason::horizon, hit);
  return result;
}

std::optional<double> time_to_ball(const LindbladChannel& ch, const ControlField& field,
                                   const BlochState& s0, const BlochState& center, double eps,
                                   const IntegratorConfig& cfg) {
  if (!(eps > 0.0)) {
    throw DomainError("ball radius eps must be positive");
  }
  const Vec3 c = center.vec();
  return first_hit(ch, field, s0, [&](double, const Vec3& r) { return (r - c).norm() - eps; }, cfg)
      .time;
}

BlochState closed_form_ad(const BlochState& s0, double t, double gamma, double beta) {
  require_time(t);
  const double rfp = AmplitudeDamping{gamma, beta}.fixed_point_radius();
  const double e = std::exp(-gamma * t / (2.0 * rfp));
  return BlochState::from_integrator(
      Vec3(e * s0.x(), e * s0.y(), e * e * (s0.z() + rfp) - rfp));
}

BlochState closed_form_dp(const BlochState& s0, double t, double gx, double gy, double gz) {
  require_time(t);
  const Depolarizing d{gx, gy, gz};
  return BlochState::from_integrator(Vec3(std::exp(-2.0 * d.big_gamma_x() * t) * s0.x(),
                                          std::exp(-2.0 * d.big_gamma_y() * t) * s0.y(),
                                          std::exp(-2.0 * d.big_gamma_z() * t) * s0.z()));
}

BlochState closed_form_pd(const BlochState& s0, double t, double ghat) {
  require_time(t);
  const double e = std::exp(-2.0 * ghat * t);
  return BlochState::from_integrator(Vec3(e * s0.x(), e * s0.y(), s0.z()));
}

Vec3 stall_control(const LindbladChannel& ch, const BlochState& s) {
  const Vec3 r = s.vec();
  const Vec3 f = ch.velocity(r);
  const double rn = r.norm();
  if (rn < 1e-15) {
    if (f.norm() > kStallTol) {
      throw DomainError("cannot stall the maximally mixed state: dissipator moves it");
    }
    return Vec3::Zero();
  }
  const double radial = f.dot(r) / rn;
  if (std::abs(radial) > kStallTol) {
    throw DomainError("state is not stallable: radial dissipative velocity " +
                      std::to_string(radial) + " cannot be cancelled by a unitary");
  }
  const Vec3 tangential = f - radial * (r / rn);
  return tangential.cross(r) / (2.0 * rn * rn);
}

RotationProtocolResult rotate_decay_rotate(const LindbladChannel& ch, const BlochState& s0,
                                           const Vec3& direction, const BlochState& center,
                                           double eps, const IntegratorConfig& cfg) {
  if (!(eps > 0.0)) {
    throw DomainError("ball radius eps must be positive");
  }
  const double target_radius = center.norm();
  auto finish = [&](const BlochState& s) {
    return target_radius > 0.0 ? rotate_to(s, center.vec()) : s;
  };

  RotationProtocolResult out;
  if (std::abs(s0.norm() - target_radius) <= eps) {
    out.time = 0.0;
    out.after_first_rotation = s0;
    out.before_final_rotation = s0;
    out.final_state = finish(s0);
    out.decay = Trajectory(s0, {}, {}, TerminalReason::ball_hit);
    return out;
  }
  out.after_first_rotation = rotate_to(s0, direction);
  auto hit = first_hit(
      ch, zero_field(), out.after_first_rotation,
      [&](double, const Vec3& r) { return std::abs(r.norm() - target_radius) - eps; }, cfg);
  out.time = hit.time;
  out.before_final_rotation = hit.trajectory.final_state();
  out.final_state = finish(out.before_final_rotation);
  out.decay = std::move(hit.trajectory);
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,r_x,r_y,r_z,purity\n";
  char buf[160];
  for (const auto& s : traj.samples()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.state.x(),
                  s.state.y(), s.state.z(), purity(s.state));
    out += buf;
  }
  return out;
}

}  // namespace bloch_relax
