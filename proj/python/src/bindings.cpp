#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "scrubber_ftc/cli.hpp"
#include "scrubber_ftc/control.hpp"
#include "scrubber_ftc/errors.hpp"
#include "scrubber_ftc/integrate.hpp"
#include "scrubber_ftc/model.hpp"
#include "scrubber_ftc/observer.hpp"
#include "scrubber_ftc/report.hpp"
#include "scrubber_ftc/scenario_file.hpp"
#include "scrubber_ftc/simulate.hpp"
#include "scrubber_ftc/trace_csv.hpp"

namespace py = pybind11;
using namespace scrubber_ftc;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict trace_columns(const Trace& t) {
  py::dict d;
  d["t"] = to_array(t.column(&TraceRow::t));
  d["r"] = to_array(t.column(&LoopSignals::r));
  d["e"] = to_array(t.column(&LoopSignals::e));
  d["u"] = to_array(t.column(&LoopSignals::u));
  d["m_dot_i"] = to_array(t.column(&TraceRow::m_dot_i));
  d["p"] = to_array(t.column(&TraceRow::p));
  d["y"] = to_array(t.column(&LoopSignals::y));
  d["f_s"] = to_array(t.column(&LoopSignals::f_s));
  d["y_m"] = to_array(t.column(&LoopSignals::y_m));
  d["f_hat_s"] = to_array(t.column(&LoopSignals::f_hat_s));
  d["y_t"] = to_array(t.column(&LoopSignals::y_t));
  const char* hat[] = {"xhat_p", "xhat_m", "xi1_hat", "xi2_hat"};
  for (int k = 0; k < 4; ++k) {
    std::vector<double> col;
    col.reserve(t.rows.size());
    for (const auto& row : t.rows) col.push_back(row.x_hat(k));
    d[hat[k]] = to_array(col);
  }
  return d;
}

py::dict metrics_dict(const StepResponseMetrics& m) {
  py::dict d;
  d["rise_time"] = m.rise_time;
  d["peak_time"] = m.peak_time;
  d["settling_time_2pct"] = m.settling_time_2pct;
  d["overshoot"] = m.overshoot;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scrubber pressure loop with sensor-fault-tolerant control";

  auto validation = py::register_exception<ValidationError>(
      m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<RuntimeFailure>(m, "RuntimeFailure", PyExc_RuntimeError);
  (void)validation;

  // Model -------------------------------------------------------------------
  py::class_<Span>(m, "Span")
      .def(py::init<double, double>(), py::arg("min"), py::arg("max"))
      .def_readwrite("min", &Span::min)
      .def_readwrite("max", &Span::max)
      .def("__repr__", [](const Span& s) {
        return "Span(" + format_double(s.min) + ", " + format_double(s.max) + ")";
      });

  py::class_<FirstOrderTF>(m, "FirstOrderTF")
      .def(py::init<double, double>(), py::arg("gain"), py::arg("tau"))
      .def_readwrite("gain", &FirstOrderTF::gain)
      .def_readwrite("tau", &FirstOrderTF::tau);

  py::class_<StateSpace>(m, "StateSpace")
      .def(py::init<>())
      .def_readwrite("A", &StateSpace::A)
      .def_readwrite("B", &StateSpace::B)
      .def_readwrite("C", &StateSpace::C)
      .def_readwrite("F", &StateSpace::F);

  py::class_<PhysicalPlantParams>(m, "PhysicalPlantParams")
      .def(py::init<>())
      .def_readwrite("V", &PhysicalPlantParams::V)
      .def_readwrite("d", &PhysicalPlantParams::d)
      .def_readwrite("H", &PhysicalPlantParams::H)
      .def_readwrite("A", &PhysicalPlantParams::A)
      .def_readwrite("rho_i", &PhysicalPlantParams::rho_i)
      .def_readwrite("rho_o", &PhysicalPlantParams::rho_o)
      .def_readwrite("h_i", &PhysicalPlantParams::h_i)
      .def_readwrite("h_o", &PhysicalPlantParams::h_o)
      .def_readwrite("g", &PhysicalPlantParams::g)
      .def_readwrite("k", &PhysicalPlantParams::k)
      .def_readwrite("p_o", &PhysicalPlantParams::p_o)
      .def("area", &PhysicalPlantParams::area);

  m.def("scrubber_tf", &scrubber_tf, py::arg("params") = PhysicalPlantParams{});
  m.def("plant_state_space", &plant_state_space, py::arg("plant"), py::arg("valve"));
  m.def("reference_plant", &reference_plant);
  m.def("physical_plant", [](const PhysicalPlantParams& p) {
    PhysicalModelParams params;
    params.plant = p;
    return physical_plant(params);
  }, py::arg("params") = PhysicalPlantParams{});
  m.def("linearized_outflow", &linearized_outflow, py::arg("p"), py::arg("k"),
        py::arg("p_o"));

  // Numerics ----------------------------------------------------------------
  m.def("integrate_step",
        [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
           const Eigen::VectorXd& x, const Eigen::VectorXd& u, double dt) {
          return integrate_step(A, B, x, u, dt);
        },
        py::arg("A"), py::arg("B"), py::arg("x"), py::arg("u"), py::arg("dt"));
  m.def("dc_gain", &dc_gain, py::arg("A"), py::arg("B"), py::arg("C"));
  m.def("eigenvalues", &eigenvalues, py::arg("M"));

  // Control -----------------------------------------------------------------
  py::class_<PIGains>(m, "PIGains")
      .def(py::init([](double kp, double ti, double td) { return PIGains{kp, ti, td}; }),
           py::arg("kp") = 0.1396, py::arg("ti") = 0.3294, py::arg("td") = 0.0)
      .def_readwrite("kp", &PIGains::kp)
      .def_readwrite("ti", &PIGains::ti)
      .def_readwrite("td", &PIGains::td);

  py::class_<ControllerState>(m, "ControllerState")
      .def(py::init<>())
      .def_readwrite("integral", &ControllerState::integral)
      .def_readwrite("previous_error", &ControllerState::previous_error)
      .def_readwrite("has_previous", &ControllerState::has_previous);

  m.def("pi_step",
        [](const ControllerState& s, double e, double dt, const PIGains& g) {
          const auto out = pi_step(s, e, dt, g);
          return py::make_tuple(out.u, out.state);
        },
        py::arg("state"), py::arg("error"), py::arg("dt"), py::arg("gains"));

  m.def("transient_metrics", [](double zeta, double omega_n) {
    const auto t = transient_metrics({zeta, omega_n});
    py::dict d;
    d["rise_time"] = t.rise_time;
    d["peak_time"] = t.peak_time;
    d["settling_time_2pct"] = t.settling_time_2pct;
    d["settling_time_5pct"] = t.settling_time_5pct;
    d["overshoot_pct"] = t.overshoot_pct;
    return d;
  }, py::arg("zeta"), py::arg("omega_n"));

  m.def("measure_step_response",
        [](const std::vector<double>& t, const std::vector<double>& y, double r) {
          return metrics_dict(measure_step_response(t, y, r));
        },
        py::arg("times"), py::arg("values"), py::arg("setpoint"));

  // Observer ----------------------------------------------------------------
  m.def("observer_matrices", [](const StateSpace& ss, const Eigen::MatrixXd& phi) {
    const auto mats = build_observer_matrices(augment(ss, phi));
    return py::make_tuple(mats.A_g, mats.B_g, mats.C_g);
  }, py::arg("plant"), py::arg("phi"));
  m.def("reported_observer_matrices", [] {
    const auto mats = reported_observer_matrices();
    return py::make_tuple(mats.A_g, mats.B_g, mats.C_g);
  });
  m.def("reported_gain_transposed", &reported_gain_transposed);
  m.def("reference_observer_poles", &reference_observer_poles);
  m.def("observability_rank",
        [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
          return observability_rank(A, C).rank;
        },
        py::arg("A"), py::arg("C"));
  m.def("place_observer_poles",
        [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
           const std::vector<Complex>& poles) {
          return place_observer_poles(A, C, poles);
        },
        py::arg("A"), py::arg("C"), py::arg("poles"));
  m.def("pole_match_error",
        [](const std::vector<Complex>& a, const std::vector<Complex>& t) {
          return pole_match_error(a, t);
        },
        py::arg("achieved"), py::arg("targets"));

  // Scenarios and runs ------------------------------------------------------
  py::class_<FaultProfile>(m, "FaultProfile")
      .def_static("none", &FaultProfile::none)
      .def_static("sensitivity", &FaultProfile::sensitivity, py::arg("alpha"),
                  py::arg("onset_step") = kDefaultFaultOnsetStep)
      .def_static("additive", &FaultProfile::additive, py::arg("bias"),
                  py::arg("onset_step") = kDefaultFaultOnsetStep)
      .def_property_readonly("kind", [](const FaultProfile& f) { return to_string(f.kind); })
      .def_readwrite("alpha", &FaultProfile::alpha)
      .def_readwrite("bias", &FaultProfile::bias)
      .def_readwrite("onset_step", &FaultProfile::onset_step);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("duration", &Scenario::duration)
      .def_readwrite("dt", &Scenario::dt)
      .def_property(
          "setpoint",
          [](const Scenario& s) {
            std::vector<std::pair<double, double>> out;
            for (const auto& c : s.setpoint) out.emplace_back(c.time, c.value);
            return out;
          },
          [](Scenario& s, const std::vector<std::pair<double, double>>& v) {
            s.setpoint.clear();
            for (const auto& [t, y] : v) s.setpoint.push_back({t, y});
          })
      .def_readwrite("fault", &Scenario::fault)
      .def_readwrite("ftc_enabled", &Scenario::ftc_enabled)
      .def_readwrite("gains", &Scenario::gains)
      .def_property(
          "model_source",
          [](const Scenario& s) { return to_string(s.model_source); },
          [](Scenario& s, const std::string& v) {
            s.model_source = model_source_from_string(v);
          })
      .def_readwrite("observer_poles", &Scenario::observer_poles)
      .def_readwrite("output_clamp", &Scenario::output_clamp)
      .def("validate", &Scenario::validate)
      .def("sample_count", &Scenario::sample_count)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

  py::class_<Trace>(m, "Trace")
      .def_readonly("dt", &Trace::dt)
      .def("__len__", [](const Trace& t) { return t.rows.size(); })
      .def("columns", &trace_columns)
      .def_property_readonly("scenario_name",
                             [](const Trace& t) { return t.meta.scenario_name; })
      .def_property_readonly("scenario_hash",
                             [](const Trace& t) { return t.meta.scenario_hash; })
      .def_property_readonly("onset_time",
                             [](const Trace& t) { return t.meta.onset_time; })
      .def("step_metrics", [](const Trace& t, double setpoint) {
        return metrics_dict(measure_step_response(t, setpoint));
      }, py::arg("setpoint"))
      .def("to_csv", &format_trace_csv)
      .def("write_csv", &write_trace_csv, py::arg("path"));

  m.def("run_scenario", &run_scenario, py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>());
  m.def("read_trace_csv", &read_trace_csv, py::arg("path"));
  m.def("parse_scenario_text",
        [](const std::string& text, const std::string& origin,
           const std::string& name) { return parse_scenario_text(text, origin, name); },
        py::arg("text"), py::arg("origin") = "<scenario>",
        py::arg("default_name") = "scenario");
  m.def("parse_scenario", &parse_scenario, py::arg("path"));
  m.def("serialize_scenario", &serialize_scenario, py::arg("scenario"));
  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (const auto& p : builtin_presets()) names.push_back(p.name);
    return names;
  });
  m.def("preset", [](const std::string& name) { return find_preset(name).scenario; },
        py::arg("name"));

  m.def("compare_runs",
        [](const Trace& ftc, const Trace& noftc, std::optional<double> alpha) {
          const auto c = compare_runs(ftc, noftc, 1e-9, alpha);
          py::dict d;
          d["steady_error_ftc"] = c.steady_error_ftc;
          d["steady_error_noftc"] = c.steady_error_noftc;
          d["divergence_step"] = c.divergence_step;
          d["predicted_ratio"] = c.predicted_ratio;
          d["observed_ratio"] = c.observed_ratio;
          d["prediction_holds"] = c.prediction_holds;
          return d;
        },
        py::arg("ftc"), py::arg("noftc"), py::arg("alpha") = py::none());
  m.def("report_text",
        [](const Scenario& s, const Trace& primary, const Trace& counterpart) {
          return format_report_text(build_report(s, primary, counterpart));
        },
        py::arg("scenario"), py::arg("primary"), py::arg("counterpart"));
  m.def("design_report", [](const std::string& source) {
    return format_design_report(model_source_from_string(source));
  }, py::arg("model") = "matrices");

  m.def("cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "scrubber_ftc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
