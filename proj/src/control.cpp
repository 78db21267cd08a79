#include "scrubber_ftc/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "scrubber_ftc/errors.hpp"

namespace scrubber_ftc {

void PIGains::validate() const {
  std::vector<std::string> errors;
  if (!std::isfinite(kp)) errors.push_back("K_p must be finite");
  if (!(ti > 0.0) || !std::isfinite(ti)) errors.push_back("T_i must be > 0");
  if (!(td >= 0.0) || !std::isfinite(td)) errors.push_back("T_d must be >= 0");
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

ControllerOutput pi_step(const ControllerState& state, double error, double dt,
                         const PIGains& gains) {
  if (!(dt > 0.0)) throw ValidationError("controller step dt must be > 0");
  ControllerState next = state;
  next.integral += error * dt;
  const double derivative =
      state.has_previous ? (error - state.previous_error) / dt : 0.0;
  next.previous_error = error;
  next.has_previous = true;

  const double u =
      gains.kp * (error + next.integral / gains.ti + gains.td * derivative);
  return {u, next};
}

double TransientSpec::omega_d() const {
  return omega_n * std::sqrt(1.0 - zeta * zeta);
}

double TransientSpec::sigma() const { return zeta * omega_n; }

TransientMetrics transient_metrics(const TransientSpec& spec) {
  if (!(spec.zeta > 0.0 && spec.zeta < 1.0)) {
    throw DomainError("transient formulas require 0 < zeta < 1");
  }
  if (!(spec.omega_n > 0.0)) throw DomainError("omega_n must be > 0");

  const double wd = spec.omega_d();
  const double sigma = spec.sigma();
  const double beta = std::atan(wd / sigma);

  TransientMetrics m;
  m.rise_time = (std::numbers::pi - beta) / wd;
  m.peak_time = std::numbers::pi / wd;
  m.settling_time_2pct = 4.0 / sigma;
  m.settling_time_5pct = 3.0 / sigma;
  m.overshoot_pct = 100.0 * std::exp(-(sigma / wd) * std::numbers::pi);
  return m;
}

StepResponseMetrics measure_step_response(std::span<const double> times,
                                          std::span<const double> values,
                                          double setpoint) {
  if (times.empty() || times.size() != values.size()) {
    throw ValidationError("step response needs equal-length, non-empty series");
  }
  if (setpoint == 0.0) throw ValidationError("step response setpoint is zero");

  StepResponseMetrics out;
  const double final_value = values.back();
  const double sign = setpoint > 0.0 ? 1.0 : -1.0;

  // A response that never gets 10% of the way to the setpoint has no
  // meaningful metrics.
  const bool reached = std::any_of(values.begin(), values.end(), [&](double v) {
    return sign * v >= 0.1 * std::abs(setpoint);
  });
  if (!reached) return out;

  auto first_crossing = [&](double level) -> std::optional<double> {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (sign * values[i] >= sign * level) return times[i];
    }
    return std::nullopt;
  };
  const auto t10 = first_crossing(0.1 * final_value);
  const auto t90 = first_crossing(0.9 * final_value);
  if (t10 && t90) out.rise_time = *t90 - *t10;

  std::size_t peak = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (sign * values[i] > sign * values[peak]) peak = i;
  }
  out.peak_time = times[peak] - times.front();
  out.overshoot =
      std::max(0.0, (values[peak] - final_value) / final_value);

  const double band = 0.02 * std::abs(final_value);
  double settle = times.front();
  for (std::size_t i = values.size(); i-- > 0;) {
    if (std::abs(values[i] - final_value) > band) {
      settle = i + 1 < times.size() ? times[i + 1] : times[i];
      break;
    }
  }
  out.settling_time_2pct = settle - times.front();
  return out;
}

}  // namespace scrubber_ftc
