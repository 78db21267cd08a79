#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

#include "scrubber_ftc/model.hpp"

namespace scrubber_ftc {

using Complex = std::complex<double>;

/// Plant extended with a first-order measurement filter
///   xi' = Phi (C x + F f_s) - Phi xi,   y_e = xi
/// so a sensor fault becomes an input-like term in the extended dynamics:
///   A_e = [[A, 0], [Phi C, -Phi]],  B_e = [B; 0],
///   F_e = [0; Phi F],               C_e = [0, I].
struct AugmentedSystem {
  StateSpace plant;
  Eigen::MatrixXd phi;
  Eigen::MatrixXd A_e;
  Eigen::MatrixXd B_e;
  Eigen::VectorXd F_e;
  Eigen::MatrixXd C_e;

  Eigen::Index states() const { return A_e.rows(); }
  Eigen::Index outputs() const { return C_e.rows(); }
};

/// Throws ValidationError on dimension mismatch or when -Phi is not Hurwitz.
AugmentedSystem augment(const StateSpace& ss, const Eigen::MatrixXd& phi);

/// Extended system with the sensor fault appended as a constant state:
///   A_g = [[A_e, F_e], [0, 0]],  B_g = [B_e; 0],  C_g = [C_e, 0].
struct ObserverMatrices {
  Eigen::MatrixXd A_g;
  Eigen::MatrixXd B_g;
  Eigen::MatrixXd C_g;
};

ObserverMatrices build_observer_matrices(const AugmentedSystem& aug);

struct ObservabilityResult {
  Eigen::Index rank = 0;
  bool observable = false;
};

/// Rank of [C; CA; ...; CA^(n-1)].
ObservabilityResult observability_rank(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& C);

/// Throws ValidationError unless `poles` is closed under conjugation.
void validate_pole_set(std::span<const Complex> poles);

/// Observer gain L with eig(A - L C) = targets.
///
/// Works on the dual pair (A^T, C^T) through the parametric Sylvester
/// form A^T X - X Lambda = C^T G, K = G X^-1, L = K^T. The free parameter
/// G is taken from a fixed deterministic family and the candidate with the
/// best-conditioned X wins. Throws DomainError for unobservable pairs.
Eigen::MatrixXd place_observer_poles(const Eigen::MatrixXd& A,
                                     const Eigen::MatrixXd& C,
                                     std::span<const Complex> targets);

/// Eigenvalues of a real square matrix.
std::vector<Complex> eigenvalues(const Eigen::MatrixXd& M);

/// Largest relative distance |achieved - target| / max(|target|, 1e-12)
/// after pairing each target with its nearest unused achieved pole.
double pole_match_error(std::span<const Complex> achieved,
                        std::span<const Complex> targets);

/// Joint state-and-fault observer
///   x_hat_e' = A_e x_hat_e + B_e u + F_e f_hat + L_x (y_e - C_e x_hat_e)
///   f_hat'   = L_f (y_e - C_e x_hat_e)
struct ObserverDesign {
  AugmentedSystem aug;
  ObserverMatrices mats;
  Eigen::MatrixXd L;  // [L_x; L_f], (n+q+1) x q
  std::vector<Complex> target_poles;

  Eigen::MatrixXd L_x() const { return L.topRows(L.rows() - 1); }
  Eigen::RowVectorXd L_f() const { return L.bottomRows(1); }

  /// eig(A_g - L C_g)
  std::vector<Complex> achieved_poles() const;
};

/// Builds the observer matrices, checks observability, places the poles and
/// verifies the resulting spectrum within 1e-6 relative.
ObserverDesign design_observer(const AugmentedSystem& aug,
                               std::span<const Complex> target_poles);

struct ObserverState {
  Eigen::VectorXd x_hat_e;
  double f_hat = 0.0;

  static ObserverState zero(const ObserverDesign& design);

  /// Composite vector [x_hat_e; f_hat].
  Eigen::VectorXd stacked() const;
  static ObserverState from_stacked(const Eigen::VectorXd& z);
};

/// Right-hand side of the observer for the composite vector [x_hat_e; f_hat].
Eigen::VectorXd observer_derivative(const ObserverDesign& design,
                                    const Eigen::VectorXd& z, double u,
                                    const Eigen::VectorXd& y_e);

/// Output residual y_e - C_e x_hat_e.
Eigen::VectorXd observer_residual(const ObserverDesign& design,
                                  const ObserverState& obs,
                                  const Eigen::VectorXd& y_e);

/// One RK4 step with u and y_e held over the step.
ObserverState observer_step(const ObserverState& obs,
                            const ObserverDesign& design, double u,
                            const Eigen::VectorXd& y_e, double dt);

// Reference design data for the identified scrubber model ------------------

/// Target observer spectrum used for the scrubber.
std::vector<Complex> reference_observer_poles();

/// Identity measurement filter. Rows 3-4 of the identified augmented matrix
/// carry unit coupling and a -1 diagonal, which pins Phi = I.
Eigen::MatrixXd reference_filter();

/// The 2x5 gain table reported alongside the target spectrum, returned
/// transposed (5x2) so it can be used as L directly. Kept only as a
/// comparison fixture; it does not realize reference_observer_poles().
Eigen::MatrixXd reported_gain_transposed();

/// A_g, B_g, C_g exactly as tabulated for the identified model.
ObserverMatrices reported_observer_matrices();

}  // namespace scrubber_ftc
