#pragma once

#include <optional>
#include <span>

namespace scrubber_ftc {

/// u = K_p [ e + (1/T_i) * integral(e) + T_d * de/dt ]
struct PIGains {
  double kp = 0.1396;
  double ti = 0.3294;  // s
  double td = 0.0;     // s

  void validate() const;
  bool operator==(const PIGains&) const = default;
};

struct ControllerState {
  double integral = 0.0;        // accumulated e*dt
  double previous_error = 0.0;
  bool has_previous = false;    // derivative is zero on the first step

  void reset() { *this = ControllerState{}; }
};

struct ControllerOutput {
  double u = 0.0;
  ControllerState state;
};

/// One discrete step of the PI(D) law: forward-rectangle integral,
/// backward-difference derivative.
ControllerOutput pi_step(const ControllerState& state, double error, double dt,
                         const PIGains& gains);

/// Second-order underdamped response description.
struct TransientSpec {
  double zeta = 0.5;
  double omega_n = 1.0;  // rad/s

  double omega_d() const;
  double sigma() const;
};

struct TransientMetrics {
  double rise_time = 0.0;       // (pi - beta) / omega_d
  double peak_time = 0.0;       // pi / omega_d
  double settling_time_2pct = 0.0;
  double settling_time_5pct = 0.0;
  double overshoot_pct = 0.0;   // 100 * exp(-sigma/omega_d * pi)
};

/// Closed-form metrics. Throws DomainError unless 0 < zeta < 1.
TransientMetrics transient_metrics(const TransientSpec& spec);

/// Metrics read off a sampled step response. Fields that cannot be
/// determined stay empty.
struct StepResponseMetrics {
  std::optional<double> rise_time;      // 10% -> 90% of final value
  std::optional<double> peak_time;
  std::optional<double> settling_time_2pct;
  std::optional<double> overshoot;      // fraction of final value, >= 0
};

/// `times` and `values` must have equal, non-zero length; `setpoint != 0`.
StepResponseMetrics measure_step_response(std::span<const double> times,
                                          std::span<const double> values,
                                          double setpoint);

}  // namespace scrubber_ftc
