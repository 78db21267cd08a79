#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scrubber_ftc/control.hpp"
#include "scrubber_ftc/ftc.hpp"
#include "scrubber_ftc/integrate.hpp"
#include "scrubber_ftc/model.hpp"
#include "scrubber_ftc/observer.hpp"

namespace scrubber_ftc {

struct SetpointChange {
  double time = 0.0;   // s
  double value = 0.0;  // psi

  bool operator==(const SetpointChange&) const = default;
};

inline constexpr double kDefaultSetpoint = 348.091;  // psi, = p_o
inline constexpr double kDefaultDt = 0.001;          // s
inline constexpr long kDefaultFaultOnsetStep = 100;

/// A complete, self-contained simulation request.
struct Scenario {
  std::string name = "scenario";
  double duration = 5.0;  // s
  double dt = kDefaultDt;
  std::vector<SetpointChange> setpoint{{0.0, kDefaultSetpoint}};
  FaultProfile fault;
  bool ftc_enabled = true;
  PIGains gains;
  ModelSource model_source = ModelSource::kIdentifiedMatrices;
  PhysicalModelParams physical;  // used when model_source == kPhysicalParams
  std::vector<Complex> observer_poles = reference_observer_poles();
  std::optional<Span> output_clamp;

  /// Throws ValidationError listing every violated invariant.
  void validate() const;

  /// Piecewise-constant reference; 0 before the first change.
  double setpoint_at(double t) const;

  /// floor(duration / dt) + 1
  long sample_count() const;

  bool operator==(const Scenario&) const = default;
};

/// Plant selected by the scenario's model source.
StateSpace scenario_plant(const Scenario& scenario);

/// Constants actually used to build a model.
struct ModelConstants {
  double ks = 0.0;
  double tau_s = 0.0;
  double kv = 0.0;
  double tau_v = 0.0;
};

/// Read the first-order constants back out of a 2-state plant.
ModelConstants constants_of(const StateSpace& plant);

struct TraceRow {
  double t = 0.0;
  LoopSignals sig;
  double m_dot_i = 0.0;
  double p = 0.0;
  Eigen::Vector4d x_hat = Eigen::Vector4d::Zero();  // p, m_dot_i, xi_1, xi_2
  Eigen::Vector2d xi = Eigen::Vector2d::Zero();     // true filter states

  /// y_e - y_hat_e
  Eigen::Vector2d residual() const { return xi - x_hat.tail<2>(); }
};

struct TraceMetadata {
  std::string scenario_name;
  std::uint64_t scenario_hash = 0;
  ModelConstants constants;
  FaultProfile fault;
  bool ftc_enabled = true;
  double onset_time = 0.0;  // s, onset_step * dt
};

struct Trace {
  double dt = 0.0;
  std::vector<TraceRow> rows;
  TraceMetadata meta;

  std::vector<double> column(double TraceRow::*field) const;
  std::vector<double> column(double LoopSignals::*field) const;
};

/// Simulates the closed loop on a uniform grid. Deterministic: identical
/// scenarios give bit-identical traces.
Trace run_scenario(const Scenario& scenario);

/// Step-response metrics of the true output against `setpoint`.
StepResponseMetrics measure_step_response(const Trace& trace, double setpoint);

/// FNV-1a over the canonical scenario text.
std::uint64_t scenario_hash(const Scenario& scenario);

// Open-loop steady state ----------------------------------------------------

/// Pressure reached for a constant valve signal u, by simulation.
double simulate_open_loop_steady_state(const StateSpace& plant, double u);

struct OpenLoopRow {
  double u = 0.0;
  double simulated = 0.0;
  double predicted = 0.0;  // dc_gain * u
  std::optional<double> reference;
  std::optional<double> error_pct;
};

/// One row per input; `references`, when given, must match `inputs` in size.
std::vector<OpenLoopRow> open_loop_table(
    const std::vector<double>& inputs, const StateSpace& plant,
    const std::vector<double>& references = {});

/// (simulated - reference) / reference * 100
double percent_error(double simulated, double reference);

/// Plant measurements of steady pressure next to the reported open-loop
/// model output (psi) and the reported percent error.
struct OpenLoopFixtureRow {
  double real = 0.0;
  double simulated = 0.0;
  double error_pct = 0.0;
};

const std::vector<OpenLoopFixtureRow>& open_loop_fixture();

}  // namespace scrubber_ftc
