#pragma once

// Independent reference computations for the tests. Nothing here calls
// into the library; everything is plain loops over std::vector.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;
using Complex = std::complex<double>;

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix out(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

/// Row echelon reduction with partial pivoting; counts pivots above `tol`
/// relative to the largest entry.
inline int rank_by_row_reduction(Matrix m, double rel_tol = 1e-10) {
  double scale = 0.0;
  for (const auto& row : m)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0;
  const double tol = rel_tol * scale;
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  int rank = 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    for (std::size_t i = r + 1; i < rows; ++i)
      if (std::abs(m[i][c]) > std::abs(m[pivot][c])) pivot = i;
    if (std::abs(m[pivot][c]) <= tol) continue;
    std::swap(m[pivot], m[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      const double f = m[i][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
    ++rank;
  }
  return rank;
}

/// Stacked [C; CA; ...; CA^(n-1)].
inline Matrix observability_matrix(const Matrix& a, const Matrix& c) {
  Matrix out;
  Matrix block = c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.insert(out.end(), block.begin(), block.end());
    block = multiply(block, a);
  }
  return out;
}

/// Characteristic polynomial coefficients of `a` (monic, highest power
/// first) by the Faddeev-LeVerrier recursion.
inline std::vector<double> characteristic_polynomial(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<double> coeffs(n + 1, 0.0);
  coeffs[0] = 1.0;
  Matrix m(n, std::vector<double>(n, 0.0));  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{k-1} I
    Matrix am = multiply(a, m);
    for (std::size_t i = 0; i < n; ++i) am[i][i] += coeffs[k - 1];
    m = am;
    const Matrix prod = multiply(a, m);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += prod[i][i];
    coeffs[k] = -trace / static_cast<double>(k);
  }
  return coeffs;
}

inline Complex eval_poly(const std::vector<double>& coeffs, Complex z) {
  Complex acc = 0.0;
  for (double c : coeffs) acc = acc * z + c;
  return acc;
}

/// Roots of a monic polynomial by Durand-Kerner iteration.
inline std::vector<Complex> polynomial_roots(const std::vector<double>& coeffs) {
  const std::size_t n = coeffs.size() - 1;
  double radius = 0.0;
  for (std::size_t i = 1; i < coeffs.size(); ++i)
    radius = std::max(radius, std::abs(coeffs[i]));
  radius = 1.0 + radius;
  std::vector<Complex> z(n);
  const Complex seed(0.4, 0.9);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(seed, static_cast<double>(i)) * radius * 0.5;
  for (int iter = 0; iter < 5000; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= (z[i] - z[j]);
      const Complex step = eval_poly(coeffs, z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15 * radius) break;
  }
  return z;
}

inline Complex nearest(const std::vector<Complex>& pool, Complex target) {
  return *std::min_element(pool.begin(), pool.end(), [&](Complex a, Complex b) {
    return std::abs(a - target) < std::abs(b - target);
  });
}

}  // namespace oracle
