#include "scrubber_ftc/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "scrubber_ftc/errors.hpp"
#include "scrubber_ftc/integrate.hpp"

namespace scrubber_ftc {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kConjugateTol = 1e-9;
constexpr double kPlacementTol = 1e-6;

bool is_real(const Complex& c) {
  return std::abs(c.imag()) <= kConjugateTol * std::max(1.0, std::abs(c));
}

// Real block-Jordan matrix with the requested spectrum. Equal real poles
// form Jordan chains; complex pairs use [[a, b], [-b, a]] blocks, chained
// with identity coupling when repeated.
MatrixXd real_spectrum_matrix(std::span<const Complex> targets) {
  const Index n = static_cast<Index>(targets.size());
  std::vector<double> reals;
  std::vector<Complex> uppers;
  for (const auto& t : targets) {
    if (is_real(t)) {
      reals.push_back(t.real());
    } else if (t.imag() > 0.0) {
      uppers.push_back(t);
    }
  }
  std::sort(reals.begin(), reals.end());
  std::sort(uppers.begin(), uppers.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  MatrixXd lambda = MatrixXd::Zero(n, n);
  Index pos = 0;
  for (std::size_t i = 0; i < uppers.size(); ++i) {
    const double a = uppers[i].real();
    const double b = uppers[i].imag();
    lambda.block(pos, pos, 2, 2) << a, b, -b, a;
    if (i > 0 && uppers[i] == uppers[i - 1]) {
      lambda.block(pos - 2, pos, 2, 2).setIdentity();
    }
    pos += 2;
  }
  for (std::size_t i = 0; i < reals.size(); ++i) {
    lambda(pos, pos) = reals[i];
    if (i > 0 && reals[i] == reals[i - 1]) lambda(pos - 1, pos) = 1.0;
    ++pos;
  }
  return lambda;
}

// Deterministic family of parameter matrices G (q x n). The first few are
// sparse patterns, the rest dense trigonometric fills.
std::vector<MatrixXd> parameter_candidates(Index q, Index n) {
  std::vector<MatrixXd> out;
  MatrixXd cyclic = MatrixXd::Zero(q, n);
  for (Index j = 0; j < n; ++j) cyclic(j % q, j) = 1.0;
  out.push_back(cyclic);
  MatrixXd staircase = cyclic;
  for (Index j = 0; j + 1 < n; ++j) staircase((j + 1) % q, j) = 1.0;
  out.push_back(staircase);
  for (int s = 0; s < 16; ++s) {
    MatrixXd g(q, n);
    for (Index i = 0; i < q; ++i) {
      for (Index j = 0; j < n; ++j) {
        g(i, j) = std::cos(0.5 + 1.7 * s + 2.3 * static_cast<double>(i) +
                           (0.9 + 0.31 * s) * static_cast<double>(j));
      }
    }
    out.push_back(g);
  }
  return out;
}

// Solves A X - X Lambda = R through the Kronecker form.
std::optional<MatrixXd> solve_sylvester(const MatrixXd& A,
                                        const MatrixXd& lambda,
                                        const MatrixXd& R) {
  const Index n = A.rows();
  const MatrixXd I = MatrixXd::Identity(n, n);
  MatrixXd K(n * n, n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      // kron(I, A) - kron(Lambda^T, I)
      K.block(i * n, j * n, n, n) = (i == j ? A : MatrixXd::Zero(n, n)) -
                                    lambda(j, i) * I;
    }
  }
  Eigen::FullPivLU<MatrixXd> lu(K);
  if (!lu.isInvertible()) return std::nullopt;
  const VectorXd vec_r = Eigen::Map<const VectorXd>(R.data(), R.size());
  const VectorXd vec_x = lu.solve(vec_r);
  return Eigen::Map<const MatrixXd>(vec_x.data(), n, n);
}

double condition_number(const MatrixXd& X) {
  Eigen::JacobiSVD<MatrixXd> svd(X);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

double spectral_separation(std::span<const Complex> a,
                           std::span<const Complex> b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : a) {
    for (const auto& y : b) {
      best = std::min(best, std::abs(x - y) / std::max(1.0, std::abs(y)));
    }
  }
  return best;
}

// Dual problem: K with eig(A - B K) = targets.
std::optional<MatrixXd> place_dual(const MatrixXd& A, const MatrixXd& B,
                                   std::span<const Complex> targets) {
  const MatrixXd lambda = real_spectrum_matrix(targets);
  std::optional<MatrixXd> best;
  double best_cond = std::numeric_limits<double>::infinity();
  for (const MatrixXd& G : parameter_candidates(B.cols(), A.rows())) {
    const auto X = solve_sylvester(A, lambda, B * G);
    if (!X) continue;
    const double cond = condition_number(*X);
    if (!std::isfinite(cond) || cond > 1e12) continue;
    const MatrixXd K = G * X->inverse();
    const auto achieved = eigenvalues(A - B * K);
    if (pole_match_error(achieved, targets) > kPlacementTol) continue;
    if (cond < best_cond) {
      best_cond = cond;
      best = K;
    }
  }
  return best;
}

// Distinct negative real poles that avoid both `avoid_a` and `avoid_b`.
std::vector<Complex> staging_poles(Index n, std::span<const Complex> avoid_a,
                                   std::span<const Complex> avoid_b) {
  for (double scale = 1.37;; scale *= 1.61) {
    std::vector<Complex> poles;
    for (Index i = 0; i < n; ++i) {
      poles.emplace_back(-scale * (1.0 + 0.73 * static_cast<double>(i)), 0.0);
    }
    if (spectral_separation(poles, avoid_a) > 1e-3 &&
        spectral_separation(poles, avoid_b) > 1e-3) {
      return poles;
    }
  }
}

}  // namespace

AugmentedSystem augment(const StateSpace& ss, const Eigen::MatrixXd& phi) {
  ss.validate();
  const Index n = ss.states();
  const Index q = ss.outputs();
  if (phi.rows() != q || phi.cols() != q) {
    throw ValidationError("filter matrix must be " + std::to_string(q) + "x" +
                          std::to_string(q));
  }
  for (const auto& ev : eigenvalues(-phi)) {
    if (!(ev.real() < 0.0)) {
      throw ValidationError("measurement filter is not stable (-Phi must be Hurwitz)");
    }
  }

  AugmentedSystem aug;
  aug.plant = ss;
  aug.phi = phi;
  aug.A_e = MatrixXd::Zero(n + q, n + q);
  aug.A_e.topLeftCorner(n, n) = ss.A;
  aug.A_e.bottomLeftCorner(q, n) = phi * ss.C;
  aug.A_e.bottomRightCorner(q, q) = -phi;
  aug.B_e = MatrixXd::Zero(n + q, ss.inputs());
  aug.B_e.topRows(n) = ss.B;
  aug.F_e = VectorXd::Zero(n + q);
  aug.F_e.tail(q) = phi * ss.F;
  aug.C_e = MatrixXd::Zero(q, n + q);
  aug.C_e.rightCols(q).setIdentity();
  return aug;
}

ObserverMatrices build_observer_matrices(const AugmentedSystem& aug) {
  const Index ne = aug.states();
  ObserverMatrices m;
  m.A_g = MatrixXd::Zero(ne + 1, ne + 1);
  m.A_g.topLeftCorner(ne, ne) = aug.A_e;
  m.A_g.topRightCorner(ne, 1) = aug.F_e;
  m.B_g = MatrixXd::Zero(ne + 1, aug.B_e.cols());
  m.B_g.topRows(ne) = aug.B_e;
  m.C_g = MatrixXd::Zero(aug.outputs(), ne + 1);
  m.C_g.leftCols(ne) = aug.C_e;
  return m;
}

ObservabilityResult observability_rank(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& C) {
  if (A.rows() != A.cols() || C.cols() != A.rows()) {
    throw ValidationError("observability_rank: inconsistent dimensions");
  }
  const Index n = A.rows();
  const Index q = C.rows();
  MatrixXd obs(n * q, n);
  MatrixXd block = C;
  for (Index i = 0; i < n; ++i) {
    obs.middleRows(i * q, q) = block;
    block = block * A;
  }
  if (obs.isZero(0.0)) return {0, n == 0};
  Eigen::ColPivHouseholderQR<MatrixXd> qr(obs);
  const Index rank = qr.rank();
  return {rank, rank == n};
}

void validate_pole_set(std::span<const Complex> poles) {
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (!std::isfinite(poles[i].real()) || !std::isfinite(poles[i].imag())) {
      throw ValidationError("observer poles must be finite");
    }
    if (used[i] || is_real(poles[i])) continue;
    bool matched = false;
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (j == i || used[j]) continue;
      if (std::abs(poles[j] - std::conj(poles[i])) <=
          kConjugateTol * std::max(1.0, std::abs(poles[i]))) {
        used[i] = used[j] = true;
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw ValidationError("observer poles are not closed under conjugation");
    }
  }
}

std::vector<Complex> eigenvalues(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<MatrixXd> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw RuntimeFailure("eigenvalue computation did not converge");
  }
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double pole_match_error(std::span<const Complex> achieved,
                        std::span<const Complex> targets) {
  if (achieved.size() != targets.size()) {
    return std::numeric_limits<double>::infinity();
  }
  std::vector<bool> used(achieved.size(), false);
  double worst = 0.0;
  for (const auto& t : targets) {
    std::size_t best = achieved.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < achieved.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(achieved[i] - t);
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_dist / std::max(std::abs(t), 1e-12));
  }
  return worst;
}

Eigen::MatrixXd place_observer_poles(const Eigen::MatrixXd& A,
                                     const Eigen::MatrixXd& C,
                                     std::span<const Complex> targets) {
  if (static_cast<Index>(targets.size()) != A.rows()) {
    throw ValidationError("need exactly " + std::to_string(A.rows()) +
                          " target poles, got " +
                          std::to_string(targets.size()));
  }
  validate_pole_set(targets);
  if (!observability_rank(A, C).observable) {
    throw DomainError("pole placement: (A, C) is not observable");
  }

  const MatrixXd At = A.transpose();
  const MatrixXd Ct = C.transpose();
  const auto open_loop = eigenvalues(A);

  // The Sylvester form needs disjoint spectra; otherwise move the open-loop
  // poles somewhere neutral first and place from there.
  if (spectral_separation(targets, open_loop) > 1e-6) {
    if (auto K = place_dual(At, Ct, targets)) return K->transpose();
  }
  const auto staging = staging_poles(A.rows(), targets, open_loop);
  const auto K1 = place_dual(At, Ct, staging);
  if (K1) {
    const MatrixXd At1 = At - Ct * (*K1);
    if (auto K2 = place_dual(At1, Ct, targets)) {
      return (*K1 + *K2).transpose();
    }
  }
  throw RuntimeFailure("pole placement failed to reach the requested spectrum");
}

std::vector<Complex> ObserverDesign::achieved_poles() const {
  return eigenvalues(mats.A_g - L * mats.C_g);
}

ObserverDesign design_observer(const AugmentedSystem& aug,
                               std::span<const Complex> target_poles) {
  ObserverDesign design;
  design.aug = aug;
  design.mats = build_observer_matrices(aug);
  design.target_poles.assign(target_poles.begin(), target_poles.end());
  design.L = place_observer_poles(design.mats.A_g, design.mats.C_g,
                                  target_poles);

  const auto achieved = design.achieved_poles();
  for (const auto& p : achieved) {
    if (!(p.real() < 0.0)) {
      throw RuntimeFailure("observer error dynamics are not Hurwitz");
    }
  }
  if (pole_match_error(achieved, target_poles) > kPlacementTol) {
    throw RuntimeFailure("observer spectrum misses the target poles");
  }
  return design;
}

ObserverState ObserverState::zero(const ObserverDesign& design) {
  return {VectorXd::Zero(design.aug.states()), 0.0};
}

Eigen::VectorXd ObserverState::stacked() const {
  VectorXd z(x_hat_e.size() + 1);
  z << x_hat_e, f_hat;
  return z;
}

ObserverState ObserverState::from_stacked(const Eigen::VectorXd& z) {
  return {z.head(z.size() - 1), z(z.size() - 1)};
}

Eigen::VectorXd observer_derivative(const ObserverDesign& design,
                                    const Eigen::VectorXd& z, double u,
                                    const Eigen::VectorXd& y_e) {
  const AugmentedSystem& aug = design.aug;
  const Index ne = aug.states();
  const auto x_hat = z.head(ne);
  const double f_hat = z(ne);
  const VectorXd residual = y_e - aug.C_e * x_hat;

  VectorXd dz(ne + 1);
  dz.head(ne) = aug.A_e * x_hat + aug.B_e.col(0) * u + aug.F_e * f_hat +
                design.L.topRows(ne) * residual;
  dz(ne) = design.L.row(ne).dot(residual);
  return dz;
}

Eigen::VectorXd observer_residual(const ObserverDesign& design,
                                  const ObserverState& obs,
                                  const Eigen::VectorXd& y_e) {
  return y_e - design.aug.C_e * obs.x_hat_e;
}

ObserverState observer_step(const ObserverState& obs,
                            const ObserverDesign& design, double u,
                            const Eigen::VectorXd& y_e, double dt) {
  if (!(dt > 0.0)) throw ValidationError("observer_step: dt must be > 0");
  if (y_e.size() != design.aug.outputs()) {
    throw ValidationError("observer_step: measurement has wrong dimension");
  }
  const VectorXd next = rk4_step(
      [&](const VectorXd& z) { return observer_derivative(design, z, u, y_e); },
      obs.stacked(), dt);
  return ObserverState::from_stacked(next);
}

std::vector<Complex> reference_observer_poles() {
  return {{-54.4047, 33.5101}, {-54.4047, -33.5101}, {-2.7588, 0.0},
          {-0.1951, 0.0},      {-0.5291, 0.0}};
}

Eigen::MatrixXd reference_filter() { return MatrixXd::Identity(2, 2); }

Eigen::MatrixXd reported_gain_transposed() {
  MatrixXd k(2, 5);
  k << -80.0016, 0.6563, 8.4656, -0.2843, 0.2234,
        18.9379, -0.2651, 3.4306, 0.0377, 0.0301;
  return k.transpose();
}

ObserverMatrices reported_observer_matrices() {
  ObserverMatrices m;
  m.A_g.resize(5, 5);
  m.A_g << -5.0250, 277.4500, 0, 0, 0,
           0, -3.9680, 0, 0, 0,
           1, 0, -1, 0, 1,
           0, 1, 0, -1, 0,
           0, 0, 0, 0, 0;
  m.B_g.resize(5, 1);
  m.B_g << 0, 0.9920, 0, 0, 0;
  m.C_g.resize(2, 5);
  m.C_g << 0, 0, 1, 0, 0,
           0, 0, 0, 1, 0;
  return m;
}

}  // namespace scrubber_ftc
