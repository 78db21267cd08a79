#pragma once

#include <Eigen/Dense>

#include <optional>

#include "scrubber_ftc/control.hpp"
#include "scrubber_ftc/model.hpp"
#include "scrubber_ftc/observer.hpp"

namespace scrubber_ftc {

enum class FaultKind { kNone, kSensitivity, kBias };

/// Sensor fault on the pressure transmitter (output 1).
///
/// Sensitivity faults scale the reading, y_m = alpha * y, and are carried
/// through the additive channel as f_s = (alpha - 1) * y. Bias faults add a
/// constant, y_m = y + bias.
struct FaultProfile {
  FaultKind kind = FaultKind::kNone;
  double alpha = 1.0;
  double bias = 0.0;
  long onset_step = 0;
  int affected_output = 1;  // 1-based; only the pressure output is supported

  static FaultProfile none() { return {}; }
  static FaultProfile sensitivity(double alpha, long onset_step);
  static FaultProfile additive(double bias, long onset_step);

  bool active_at(long step) const {
    return kind != FaultKind::kNone && step >= onset_step;
  }

  void validate() const;
  bool operator==(const FaultProfile&) const = default;
};

std::string to_string(FaultKind kind);
FaultKind fault_kind_from_string(const std::string& text);

struct FaultedMeasurement {
  double y_m = 0.0;
  double f_s = 0.0;
};

FaultedMeasurement apply_sensor_fault(double y, const FaultProfile& profile,
                                      long step);

/// y_t = y_m - f_hat
inline double compensate(double y_m, double f_hat) { return y_m - f_hat; }

/// Everything logged for one loop iteration.
struct LoopSignals {
  double r = 0.0;
  double e = 0.0;
  double u = 0.0;
  double y = 0.0;
  double y_m = 0.0;
  double y_t = 0.0;
  double f_s = 0.0;
  double f_hat_s = 0.0;
};

/// Static wiring of the closed loop. Built once per scenario.
class LoopModel {
 public:
  LoopModel(ObserverDesign design, PIGains gains, FaultProfile fault,
            bool ftc_enabled, double dt,
            std::optional<Span> output_clamp = std::nullopt);

  const ObserverDesign& design() const { return design_; }
  const PIGains& gains() const { return gains_; }
  const FaultProfile& fault() const { return fault_; }
  bool ftc_enabled() const { return ftc_enabled_; }
  double dt() const { return dt_; }
  const std::optional<Span>& output_clamp() const { return clamp_; }

  /// Dynamics of the true plant plus measurement filter, x_t = [x; xi],
  /// with the filter driven by the faulted measurement.
  const Eigen::MatrixXd& truth_matrix(bool fault_active) const {
    return fault_active ? truth_faulted_ : truth_nominal_;
  }
  /// Constant filter forcing contributed by a bias fault.
  const Eigen::VectorXd& truth_bias_forcing() const { return bias_forcing_; }

 private:
  ObserverDesign design_;
  PIGains gains_;
  FaultProfile fault_;
  bool ftc_enabled_;
  double dt_;
  std::optional<Span> clamp_;
  Eigen::MatrixXd truth_nominal_;
  Eigen::MatrixXd truth_faulted_;
  Eigen::VectorXd bias_forcing_;
};

struct LoopState {
  Eigen::VectorXd truth;  // [p, m_dot_i, xi_1, xi_2]
  ControllerState controller;
  ObserverState observer;
  long step = 0;

  static LoopState zero(const LoopModel& model);
};

struct LoopStepResult {
  LoopState next;
  LoopSignals signals;
};

/// One loop iteration at t = step * dt:
/// measure -> fault -> estimate -> compensate -> control -> integrate.
/// Plant, filter and observer advance together over [t, t + dt] under the
/// same held control signal.
LoopStepResult closed_loop_step(const LoopState& state, const LoopModel& model,
                                double reference);

}  // namespace scrubber_ftc
