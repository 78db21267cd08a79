#include "scrubber_ftc/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "scrubber_ftc/errors.hpp"
#include "scrubber_ftc/scenario_file.hpp"

namespace scrubber_ftc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void Scenario::validate() const {
  std::vector<std::string> errors;
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    errors.push_back("duration must be > 0");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    errors.push_back("dt must be > 0");
  } else if (dt > duration) {
    errors.push_back("dt must not exceed duration");
  }
  if (setpoint.empty()) errors.push_back("setpoint profile is empty");
  for (std::size_t i = 0; i < setpoint.size(); ++i) {
    const auto& sp = setpoint[i];
    if (!std::isfinite(sp.value)) errors.push_back("setpoint value must be finite");
    if (sp.time < 0.0 || sp.time > duration) {
      errors.push_back("setpoint time " + std::to_string(sp.time) +
                       " outside [0, duration]");
    }
    if (i > 0 && sp.time < setpoint[i - 1].time) {
      errors.push_back("setpoint times must be non-decreasing");
    }
  }
  auto collect = [&errors](auto&& check) {
    try {
      check();
    } catch (const ValidationError& e) {
      errors.insert(errors.end(), e.violations().begin(), e.violations().end());
    }
  };
  collect([&] { fault.validate(); });
  collect([&] { gains.validate(); });
  collect([&] { validate_pole_set(observer_poles); });
  if (observer_poles.size() != 5) {
    errors.push_back("observer needs exactly 5 poles (got " +
                     std::to_string(observer_poles.size()) + ")");
  }
  for (const auto& pole : observer_poles) {
    if (!(pole.real() < 0.0)) {
      errors.push_back("observer poles must have negative real part");
      break;
    }
  }
  if (output_clamp && !(output_clamp->max > output_clamp->min)) {
    errors.push_back("output clamp needs max > min");
  }
  if (model_source == ModelSource::kPhysicalParams) {
    collect([&] { physical.plant.validate(); });
    if (!(physical.valve_tau > 0.0)) errors.push_back("valve_tau must be > 0");
    for (const auto& [label, span] :
         {std::pair{"gas_span", physical.gas_span},
          std::pair{"ip_out_span", physical.ip_out_span},
          std::pair{"ip_in_span", physical.ip_in_span}}) {
      if (!(span.max > span.min)) {
        errors.push_back(std::string(label) + " needs max > min");
      }
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

double Scenario::setpoint_at(double t) const {
  double value = 0.0;
  for (const auto& sp : setpoint) {
    if (sp.time <= t) value = sp.value;
  }
  return value;
}

long Scenario::sample_count() const {
  // Guard against duration/dt landing a hair below an integer.
  return static_cast<long>(std::floor(duration / dt + 1e-9)) + 1;
}

StateSpace scenario_plant(const Scenario& scenario) {
  return scenario.model_source == ModelSource::kPhysicalParams
             ? physical_plant(scenario.physical)
             : reference_plant();
}

ModelConstants constants_of(const StateSpace& plant) {
  ModelConstants c;
  c.tau_s = -1.0 / plant.A(0, 0);
  c.ks = plant.A(0, 1) * c.tau_s;
  c.tau_v = -1.0 / plant.A(1, 1);
  c.kv = plant.B(1, 0) * c.tau_v;
  return c;
}

std::vector<double> Trace::column(double TraceRow::*field) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.*field);
  return out;
}

std::vector<double> Trace::column(double LoopSignals::*field) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.sig.*field);
  return out;
}

Trace run_scenario(const Scenario& scenario) {
  scenario.validate();
  const StateSpace plant = scenario_plant(scenario);
  const AugmentedSystem aug = augment(plant, reference_filter());
  const LoopModel model(design_observer(aug, scenario.observer_poles),
                        scenario.gains, scenario.fault, scenario.ftc_enabled,
                        scenario.dt, scenario.output_clamp);

  Trace trace;
  trace.dt = scenario.dt;
  trace.meta.scenario_name = scenario.name;
  trace.meta.scenario_hash = scenario_hash(scenario);
  trace.meta.constants = constants_of(plant);
  trace.meta.fault = scenario.fault;
  trace.meta.ftc_enabled = scenario.ftc_enabled;
  trace.meta.onset_time =
      static_cast<double>(scenario.fault.onset_step) * scenario.dt;

  const long samples = scenario.sample_count();
  trace.rows.reserve(static_cast<std::size_t>(samples));
  LoopState state = LoopState::zero(model);
  for (long k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * scenario.dt;
    auto step = closed_loop_step(state, model, scenario.setpoint_at(t));

    TraceRow row;
    row.t = t;
    row.sig = step.signals;
    row.p = state.truth(0);
    row.m_dot_i = state.truth(1);
    row.x_hat = state.observer.x_hat_e.head<4>();
    row.xi = state.truth.segment<2>(2);
    trace.rows.push_back(row);
    state = std::move(step.next);
  }
  return trace;
}

StepResponseMetrics measure_step_response(const Trace& trace, double setpoint) {
  const auto t = trace.column(&TraceRow::t);
  const auto y = trace.column(&LoopSignals::y);
  return measure_step_response(t, y, setpoint);
}

std::uint64_t scenario_hash(const Scenario& scenario) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_scenario(scenario)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double simulate_open_loop_steady_state(const StateSpace& plant, double u) {
  plant.validate();
  double slowest = 0.0;
  double fastest = 0.0;
  for (const auto& ev : eigenvalues(plant.A)) {
    if (!(ev.real() < 0.0)) {
      throw DomainError("open-loop steady state needs a stable plant");
    }
    const double tau = -1.0 / ev.real();
    slowest = std::max(slowest, tau);
    fastest = fastest == 0.0 ? tau : std::min(fastest, tau);
  }
  // 40 slowest time constants, 100 steps per fastest one.
  const double dt = fastest / 100.0;
  const long steps = static_cast<long>(std::ceil(40.0 * slowest / dt));
  VectorXd x = VectorXd::Zero(plant.states());
  const VectorXd input = VectorXd::Constant(plant.inputs(), u);
  for (long k = 0; k < steps; ++k) {
    x = integrate_step(plant.A, plant.B, x, input, dt);
  }
  return plant.C.row(0).dot(x);
}

std::vector<OpenLoopRow> open_loop_table(const std::vector<double>& inputs,
                                         const StateSpace& plant,
                                         const std::vector<double>& references) {
  if (!references.empty() && references.size() != inputs.size()) {
    throw ValidationError("open-loop table: one reference per input required");
  }
  const MatrixXd gain = dc_gain(plant.A, plant.B, plant.C);
  std::vector<OpenLoopRow> rows;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    OpenLoopRow row;
    row.u = inputs[i];
    row.simulated = simulate_open_loop_steady_state(plant, inputs[i]);
    row.predicted = gain(0, 0) * inputs[i];
    if (!references.empty()) {
      row.reference = references[i];
      row.error_pct = percent_error(row.simulated, references[i]);
    }
    rows.push_back(row);
  }
  return rows;
}

double percent_error(double simulated, double reference) {
  if (reference == 0.0) throw DomainError("percent error against zero reference");
  return (simulated - reference) / reference * 100.0;
}

const std::vector<OpenLoopFixtureRow>& open_loop_fixture() {
  // Steady pressures (psi) logged on scrubber V-100 versus the open-loop
  // model, with the reported error column.
  static const std::vector<OpenLoopFixtureRow> rows = {
      {346.113, 349.6, 1.01}, {347.235, 351.0, 1.08}, {348.091, 352.1, 1.15},
      {346.702, 350.2, 1.01}, {344.805, 347.9, 0.90}, {345.921, 349.9, 1.15},
      {347.000, 350.7, 1.07}, {345.065, 349.0, 1.14}, {342.186, 345.1, 0.85},
      {344.237, 347.7, 1.01},
  };
  return rows;
}

}  // namespace scrubber_ftc
