#pragma once

#include <optional>
#include <string>

#include "scrubber_ftc/simulate.hpp"

namespace scrubber_ftc {

/// FTC-on versus PI-only comparison of two runs on the same grid.
struct RunComparison {
  double steady_error_ftc = 0.0;    // (y - r) / r at the last sample
  double steady_error_noftc = 0.0;
  std::optional<long> divergence_step;  // first step with |dy| > epsilon
  std::optional<double> predicted_ratio;  // 1/alpha for sensitivity faults
  double observed_ratio = 0.0;            // y/r of the PI-only run
  std::optional<bool> prediction_holds;   // within 0.5 %
};

/// Throws ValidationError when the time grids differ. `sensitivity` enables
/// the y/r = 1/alpha check on the PI-only trace.
RunComparison compare_runs(const Trace& ftc, const Trace& noftc,
                           double epsilon = 1e-9,
                           std::optional<double> sensitivity = std::nullopt);

/// First time after which |f_hat_s - f_s| stays within `fraction` of the
/// largest |f_s| seen. Empty for fault-free traces.
std::optional<double> observer_convergence_time(const Trace& trace,
                                                double fraction = 0.02);

struct ConstantsComparison {
  ModelConstants identified;
  ModelConstants physical;
};

ConstantsComparison compare_model_constants(
    const PhysicalModelParams& physical = {});

struct RunReport {
  std::string scenario_name;
  std::uint64_t scenario_hash = 0;
  bool ftc_enabled = true;
  std::string fault_summary;
  double dt = 0.0;
  double duration = 0.0;
  double onset_time = 0.0;
  double final_setpoint = 0.0;
  long samples = 0;
  StepResponseMetrics step;
  double steady_error = 0.0;
  std::optional<double> convergence_time;
  RunComparison comparison;
  ModelSource model_source = ModelSource::kIdentifiedMatrices;
  ConstantsComparison constants;
};

/// `counterpart` is the same scenario with FTC toggled.
RunReport build_report(const Scenario& scenario, const Trace& primary,
                       const Trace& counterpart);

std::string format_report_text(const RunReport& report);
std::string format_report_kv(const RunReport& report);

/// Model matrices, placed gain, achieved spectrum and the check of the
/// reported gain table.
std::string format_design_report(ModelSource source = ModelSource::kIdentifiedMatrices,
                                 const PhysicalModelParams& physical = {});

/// Open-loop fixture rows with recomputed percent errors, followed by the
/// dc-gain versus long-simulation check of the identified plant.
std::string format_open_loop_report();

}  // namespace scrubber_ftc
