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

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "bloch_relax/analytic.hpp"
#include "bloch_relax/bloch.hpp"
#include "bloch_relax/channels.hpp"
#include "bloch_relax/cli/commands.hpp"
#include "bloch_relax/cli/config.hpp"
#include "bloch_relax/control.hpp"
#include "bloch_relax/dynamics.hpp"
#include "bloch_relax/errors.hpp"
#include "bloch_relax/optimize.hpp"

namespace py = pybind11;
using namespace bloch_relax;

namespace {

IntegratorConfig integrator(double t_max, double rel_tol, double abs_tol) {
  IntegratorConfig cfg;
  cfg.t_max = t_max;
  cfg.rel_tol = rel_tol;
  cfg.abs_tol = abs_tol;
  return cfg;
}

ControlField field_from(const py::object& h) {
  if (h.is_none()) return zero_field();
  if (py::isinstance<py::function>(h)) {
    auto f = h.cast<std::function<Vec3(double)>>();
    return [f](double t) {
      py::gil_scoped_acquire gil;
      return f(t);
    };
  }
  return constant_field(h.cast<Vec3>());
}

// (n, 4) array of t, r_x, r_y, r_z at the accepted steps.
py::array_t<double> samples_array(const Trajectory& traj) {
  const auto& s = traj.samples();
  py::array_t<double> out({static_cast<py::ssize_t>(s.size()), py::ssize_t{4}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < s.size(); ++i) {
    a(i, 0) = s[i].t;
    for (int k = 0; k < 3; ++k) a(i, k + 1) = s[i].state.vec()(k);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Controlled relaxation of a driven qubit";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<BlochState>(m, "BlochState")
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("z"))
      .def(py::init<const Vec3&>(), py::arg("r"))
      .def_property_readonly("vec", &BlochState::vec)
      .def_property_readonly("x", &BlochState::x)
      .def_property_readonly("y", &BlochState::y)
      .def_property_readonly("z", &BlochState::z)
      .def("norm", &BlochState::norm)
      .def("__repr__", [](const BlochState& s) {
        return "BlochState(" + std::to_string(s.x()) + ", " + std::to_string(s.y()) + ", " +
               std::to_string(s.z()) + ")";
      });

  m.def("purity", &purity);
  m.def("trace_distance", &trace_distance);

  py::class_<LindbladChannel>(m, "Channel")
      .def_property_readonly("linear_part", &LindbladChannel::linear_part)
      .def_property_readonly("offset", &LindbladChannel::offset)
      .def_property_readonly("reference_rate", &LindbladChannel::reference_rate)
      .def("velocity", &LindbladChannel::velocity)
      .def("to_json", [](const LindbladChannel& ch) { return channel_to_json(ch).dump(); })
      .def_static("from_json", [](const std::string& s) {
        return channel_from_json(nlohmann::json::parse(s));
      });

  m.def("amplitude_damping", &amplitude_damping, py::arg("gamma"), py::arg("beta"));
  m.def("depolarizing", &depolarizing, py::arg("gx"), py::arg("gy"), py::arg("gz"));
  m.def("phase_damping", &phase_damping, py::arg("ghat"));
  m.def("purity_speed", py::overload_cast<const LindbladChannel&, const BlochState&>(&purity_speed));
  m.def("target_fixed_point", [](const LindbladChannel& ch, const BlochState& s0) {
    return BlochState(fixed_points(ch).project(s0.vec()));
  });

  m.def(
      "evolve",
      [](const LindbladChannel& ch, const BlochState& s0, double t_max, const py::object& h,
         double rel_tol, double abs_tol) {
        const auto field = field_from(h);
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = evolve(ch, field, s0, integrator(t_max, rel_tol, abs_tol));
        }
        return samples_array(traj);
      },
      py::arg("channel"), py::arg("s0"), py::arg("t_max"), py::arg("h") = py::none(),
      py::arg("rel_tol") = 1e-9, py::arg("abs_tol") = 1e-12,
      "Integrates to t_max; returns rows (t, r_x, r_y, r_z).");

  m.def(
      "time_to_ball",
      [](const LindbladChannel& ch, const BlochState& s0, const BlochState& center, double eps,
         double t_max, const py::object& h) {
        const auto field = field_from(h);
        py::gil_scoped_release release;
        return time_to_ball(ch, field, s0, center, eps, integrator(t_max, 1e-9, 1e-12));
      },
      py::arg("channel"), py::arg("s0"), py::arg("center"), py::arg("eps"), py::arg("t_max"),
      py::arg("h") = py::none());

  m.def("closed_form_ad", &closed_form_ad);
  m.def("closed_form_dp", &closed_form_dp);
  m.def("closed_form_pd", &closed_form_pd);
  m.def("stall_control", &stall_control);

  m.def("free_time", &analytic::analytic_free_time, py::arg("channel"), py::arg("s0"),
        py::arg("eps"));
  m.def("fast_time", &analytic::analytic_fast_time, py::arg("channel"), py::arg("s0"),
        py::arg("eps"));
  m.def("theta_stall", [](double r, double gamma, double beta) {
    return analytic::theta_stall(r, {gamma, beta});
  });

  m.def(
      "optimize",
      [](const LindbladChannel& ch, const BlochState& s0, double eps, double m_bound,
         double omega, int restarts, std::uint64_t seed, long max_evals, int jobs) {
        HittingProblem problem{ch, s0, eps, {}, {}};
        problem.control.omega = omega;
        OptimizeSettings settings;
        settings.nelder_mead.max_evals = max_evals;
        settings.jobs = jobs;
        OptimizeReport r;
        {
          py::gil_scoped_release release;
          r = optimize_T_m(m_bound, problem, restarts, seed, settings);
        }
        return to_json(r).dump();
      },
      py::arg("channel"), py::arg("s0"), py::arg("eps"), py::arg("m"), py::arg("omega") = 0.0,
      py::arg("restarts") = 4, py::arg("seed") = 0, py::arg("max_evals") = 6000,
      py::arg("jobs") = 1, "Best hitting time at control bound m, as a JSON string.");

  m.def("analytic_report", [](const std::string& config) {
    return cli::cmd_analytic(cli::config_from_json(nlohmann::json::parse(config))).dump();
  });
}
