#pragma once

#include <Eigen/Dense>

#include "scrubber_ftc/errors.hpp"

namespace scrubber_ftc {

/// Throws RuntimeFailure when any component is NaN or infinite.
void check_finite(const Eigen::Ref<const Eigen::VectorXd>& x, const char* what);

/// Classical fourth-order Runge-Kutta step for x' = f(x), where the
/// derivative functor already closes over any zero-order-held inputs.
template <class Derivative>
Eigen::VectorXd rk4_step(const Derivative& f, const Eigen::VectorXd& x,
                         double dt) {
  const Eigen::VectorXd k1 = f(x);
  const Eigen::VectorXd k2 = f(x + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = f(x + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = f(x + dt * k3);
  Eigen::VectorXd next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  check_finite(next, "integrated state");
  return next;
}

/// One RK4 step of x' = A x + B u with u held constant over the step.
Eigen::VectorXd integrate_step(const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& B,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& u, double dt);

/// Steady-state gain -C A^-1 B. Throws DomainError when A is singular.
Eigen::MatrixXd dc_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const Eigen::MatrixXd& C);

}  // namespace scrubber_ftc
