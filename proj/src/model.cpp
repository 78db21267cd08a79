#include "scrubber_ftc/model.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "scrubber_ftc/errors.hpp"

namespace scrubber_ftc {

namespace {

void require_positive(std::vector<std::string>& errors, const char* name,
                      double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    errors.push_back(std::string(name) + " must be finite and > 0 (got " +
                     std::to_string(value) + ")");
  }
}

void require_span(const char* name, Span span) {
  if (!std::isfinite(span.min) || !std::isfinite(span.max) ||
      !(span.max > span.min)) {
    throw ValidationError(std::string(name) + " span must satisfy max > min");
  }
}

}  // namespace

double PhysicalPlantParams::area() const {
  if (A > 0.0) return A;
  return std::numbers::pi * d * d / 4.0;
}

void PhysicalPlantParams::validate() const {
  std::vector<std::string> errors;
  require_positive(errors, "V", V);
  require_positive(errors, "d", d);
  require_positive(errors, "H", H);
  if (A != 0.0) require_positive(errors, "A", A);
  require_positive(errors, "rho_i", rho_i);
  require_positive(errors, "rho_o", rho_o);
  require_positive(errors, "h_i", h_i);
  require_positive(errors, "h_o", h_o);
  require_positive(errors, "g", g);
  require_positive(errors, "k", k);
  require_positive(errors, "p_o", p_o);
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

PhysicalPlantParams reference_plant_params() { return PhysicalPlantParams{}; }

void FirstOrderTF::validate() const {
  std::vector<std::string> errors;
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    errors.push_back("time constant must be finite and > 0");
  }
  if (gain == 0.0 || !std::isfinite(gain)) {
    errors.push_back("gain must be finite and nonzero");
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

void StateSpace::validate() const {
  std::vector<std::string> errors;
  const auto n = A.rows();
  if (A.cols() != n) errors.push_back("A must be square");
  if (B.rows() != n) errors.push_back("B must have as many rows as A");
  if (C.cols() != n) errors.push_back("C must have as many columns as A");
  if (F.size() != C.rows()) errors.push_back("F must have one entry per output");
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

FirstOrderTF scrubber_tf(const PhysicalPlantParams& params) {
  if (!(params.p_o > 0.0) || !(params.k > 0.0) ||
      !(params.rho_o * params.h_o > 0.0)) {
    throw DomainError("scrubber gain needs p_o > 0, k > 0 and rho_o*h_o > 0");
  }
  params.validate();
  const double root_po = std::sqrt(params.p_o);
  const double out_term = params.rho_o * params.h_o * params.g;
  // g appears on both sides of the ratio and cancels.
  const double gain = (2.0 * root_po / params.k) *
                      (params.rho_i * params.h_i * params.g) / out_term;
  const double tau = 2.0 * params.area() * root_po / (out_term * params.k);
  return {gain, tau};
}

FirstOrderTF transmitter_tf(Span out_span, Span in_span, double tau_t) {
  require_span("transmitter output", out_span);
  require_span("transmitter input", in_span);
  FirstOrderTF tf{out_span.width() / in_span.width(), tau_t};
  tf.validate();
  return tf;
}

double valve_gain(Span gas_span, Span ip_out_span, Span ip_in_span) {
  require_span("gas", gas_span);
  require_span("I/P output", ip_out_span);
  require_span("I/P input", ip_in_span);
  const double ip_gain = ip_out_span.width() / ip_in_span.width();
  const double valve_body_gain = gas_span.width() / ip_out_span.width();
  return valve_body_gain * ip_gain;
}

double flow_change_fraction(double q_max, double q_min) {
  if (q_max == 0.0) throw DomainError("flow change fraction needs q_max != 0");
  return (q_max - q_min) / q_max;
}

double valve_time_constant(double full_stroke_time, double delta_v,
                           double inherent_ratio) {
  std::vector<std::string> errors;
  if (!(full_stroke_time > 0.0)) errors.push_back("T_v must be > 0");
  if (!(delta_v >= 0.0 && delta_v <= 1.0)) {
    errors.push_back("delta_V must lie in [0, 1]");
  }
  if (!(inherent_ratio >= 0.0)) errors.push_back("R_v must be >= 0");
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return full_stroke_time * (delta_v + inherent_ratio);
}

double linearized_outflow(double p, double k, double p_o) {
  if (!(p_o > 0.0)) throw DomainError("linearization point p_o must be > 0");
  const double root = std::sqrt(p_o);
  return k * root + k / (2.0 * root) * (p - p_o);
}

double nonlinear_pressure_rate(double p, double m_dot_i,
                               const PhysicalPlantParams& params) {
  if (p < 0.0) throw DomainError("pressure must be >= 0 for sqrt outflow");
  const double area = params.area();
  const double inflow = params.rho_i * params.h_i * params.g * m_dot_i / area;
  const double outflow =
      params.rho_o * params.h_o * params.g * params.k * std::sqrt(p) / area;
  return inflow - outflow;
}

double linearized_pressure_rate(double p, double m_dot_i,
                                const PhysicalPlantParams& params) {
  const double area = params.area();
  const double inflow = params.rho_i * params.h_i * params.g * m_dot_i / area;
  const double outflow = params.rho_o * params.h_o * params.g *
                         linearized_outflow(p, params.k, params.p_o) / area;
  return inflow - outflow;
}

StateSpace plant_state_space(const FirstOrderTF& plant,
                             const FirstOrderTF& valve) {
  plant.validate();
  valve.validate();
  StateSpace ss;
  ss.A.resize(2, 2);
  ss.A << -1.0 / plant.tau, plant.gain / plant.tau,
          0.0, -1.0 / valve.tau;
  ss.B.resize(2, 1);
  ss.B << 0.0, valve.gain / valve.tau;
  ss.C = Eigen::MatrixXd::Identity(2, 2);
  ss.F.resize(2);
  ss.F << 1.0, 0.0;
  return ss;
}

FirstOrderTF identified_scrubber_tf(const IdentifiedPlantConstants& c) {
  return {c.ks_over_tau_s / c.inv_tau_s, 1.0 / c.inv_tau_s};
}

FirstOrderTF identified_valve_tf(const IdentifiedPlantConstants& c) {
  return {c.kv_over_tau_v / c.inv_tau_v, 1.0 / c.inv_tau_v};
}

StateSpace reference_plant() {
  return plant_state_space(identified_scrubber_tf(), identified_valve_tf());
}

StateSpace physical_plant(const PhysicalModelParams& params) {
  const FirstOrderTF vessel = scrubber_tf(params.plant);
  const FirstOrderTF valve{
      valve_gain(params.gas_span, params.ip_out_span, params.ip_in_span),
      params.valve_tau};
  return plant_state_space(vessel, valve);
}

std::string to_string(ModelSource source) {
  switch (source) {
    case ModelSource::kIdentifiedMatrices:
      return "matrices";
    case ModelSource::kPhysicalParams:
      return "physical";
  }
  return "unknown";
}

ModelSource model_source_from_string(const std::string& text) {
  if (text == "matrices") return ModelSource::kIdentifiedMatrices;
  if (text == "physical") return ModelSource::kPhysicalParams;
  throw ValidationError("model source must be 'matrices' or 'physical' (got '" +
                        text + "')");
}

}  // namespace scrubber_ftc
