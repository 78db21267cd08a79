#include "scrubber_ftc/integrate.hpp"

#include <string>

namespace scrubber_ftc {

void check_finite(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const char* what) {
  if (!x.allFinite()) {
    throw RuntimeFailure(std::string("instability guard: non-finite ") + what);
  }
}

Eigen::VectorXd integrate_step(const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& B,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& u, double dt) {
  if (A.rows() != A.cols() || A.rows() != x.size() || B.rows() != x.size() ||
      B.cols() != u.size()) {
    throw ValidationError("integrate_step: inconsistent dimensions");
  }
  if (!(dt > 0.0)) throw ValidationError("integrate_step: dt must be > 0");
  const Eigen::VectorXd forcing = B * u;
  return rk4_step([&](const Eigen::VectorXd& s) -> Eigen::VectorXd {
                    return A * s + forcing;
                  },
                  x, dt);
}

Eigen::MatrixXd dc_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const Eigen::MatrixXd& C) {
  if (A.rows() != A.cols() || B.rows() != A.rows() || C.cols() != A.rows()) {
    throw ValidationError("dc_gain: inconsistent dimensions");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw DomainError("dc_gain: A is singular");
  return -C * lu.solve(B);
}

}  // namespace scrubber_ftc
