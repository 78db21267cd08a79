#pragma once

#include <Eigen/Dense>

#include <string>

namespace scrubber_ftc {

/// Closed interval used for instrument spans (min, max).
struct Span {
  double min = 0.0;
  double max = 0.0;

  double width() const { return max - min; }
  bool operator==(const Span&) const = default;
};

/// Physical description of the scrubber vessel and its gas streams.
///
/// Pressure is carried in psi everywhere; `p_o` is the linearization point
/// of the square-root outflow. `H`, `V` and the specific gravities are
/// documentation only and never enter the dynamics.
struct PhysicalPlantParams {
  double V = 2.5;         // m^3
  double d = 1.07;        // m
  double H = 2.4;         // m
  double A = 0.0;         // m^2, cross-section; 0 means "derive from d"
  double rho_i = 5.2;     // kg/m^3
  double rho_o = 4.9;     // kg/m^3
  double h_i = 4.9;       // J/kg
  double h_o = 4.1;       // J/kg
  double g = 9.81;        // m/s^2
  double k = 1.0;         // outflow coefficient
  double p_o = 348.091;   // psi
  double gamma_l = 0.726;
  double gamma_g = 1.173;

  /// Cross-section area, computed from `d` when `A` is left at zero.
  double area() const;

  /// Throws ValidationError listing every violated invariant.
  void validate() const;

  bool operator==(const PhysicalPlantParams&) const = default;
};

/// Reference parameter set of the studied scrubber (V-100).
PhysicalPlantParams reference_plant_params();

/// K / (tau s + 1)
struct FirstOrderTF {
  double gain = 1.0;
  double tau = 1.0;

  /// Throws ValidationError when tau <= 0 or the gain is zero/non-finite.
  void validate() const;
};

/// Continuous LTI model  x' = A x + B u,  y = C x + F f_s.
/// For the scrubber the states are (pressure p, inflow m_dot_i).
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::VectorXd F;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }

  void validate() const;
};

// Model constructors --------------------------------------------------------

/// Linearized vessel pressure response to inlet flow.
FirstOrderTF scrubber_tf(const PhysicalPlantParams& params);

/// Transmitter as a first-order lag whose gain is the output/input span ratio.
FirstOrderTF transmitter_tf(Span out_span, Span in_span, double tau_t);

/// Control valve gain (mmscfd/mA): gas span per psi times I/P span per mA.
double valve_gain(Span gas_span, Span ip_out_span, Span ip_in_span);

/// Valve flow change fraction (q_max - q_min) / q_max.
double flow_change_fraction(double q_max, double q_min);

inline constexpr double kDefaultInherentStrokeRatio = 0.03;

/// tau_v = T_v (dV + R_v)
double valve_time_constant(double full_stroke_time, double delta_v,
                           double inherent_ratio = kDefaultInherentStrokeRatio);

/// First-order Taylor expansion of k*sqrt(p) about p_o.
double linearized_outflow(double p, double k, double p_o);

/// Exact pressure balance with square-root outflow.
double nonlinear_pressure_rate(double p, double m_dot_i,
                               const PhysicalPlantParams& params);

/// Same balance with the outflow replaced by its linearization about p_o.
double linearized_pressure_rate(double p, double m_dot_i,
                                const PhysicalPlantParams& params);

/// Series valve -> vessel model with both states measured:
///   A = [[-1/tau_s, K_s/tau_s], [0, -1/tau_v]],  B = [0; K_v/tau_v],
///   C = I, F = [1; 0].
StateSpace plant_state_space(const FirstOrderTF& plant,
                             const FirstOrderTF& valve);

// Canonical numeric model ---------------------------------------------------

/// Entries of the identified 2-state model (rows 1-2 of the augmented
/// observer matrix and the valve input column).
struct IdentifiedPlantConstants {
  double inv_tau_s = 5.0250;     // 1/s
  double ks_over_tau_s = 277.45;
  double inv_tau_v = 3.9680;     // 1/s
  double kv_over_tau_v = 0.9920;
};

FirstOrderTF identified_scrubber_tf(const IdentifiedPlantConstants& c = {});
FirstOrderTF identified_valve_tf(const IdentifiedPlantConstants& c = {});

/// The canonical plant: identified constants fed through plant_state_space.
StateSpace reference_plant();

/// Everything needed to build the plant from first principles.
struct PhysicalModelParams {
  PhysicalPlantParams plant = reference_plant_params();
  Span gas_span{12.0, 16.0};      // mmscfd
  Span ip_out_span{3.0, 15.0};    // psi
  Span ip_in_span{4.0, 20.0};     // mA
  double valve_tau = 1.0 / 3.9680;  // s

  bool operator==(const PhysicalModelParams&) const = default;
};

/// Plant built from vessel physics and instrument spans.
StateSpace physical_plant(const PhysicalModelParams& params);

/// Which construction path produced a model.
enum class ModelSource { kIdentifiedMatrices, kPhysicalParams };

std::string to_string(ModelSource source);
ModelSource model_source_from_string(const std::string& text);

}  // namespace scrubber_ftc
