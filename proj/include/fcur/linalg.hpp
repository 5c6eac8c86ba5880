#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fcur/errors.hpp"

namespace fcur {

// Dense row-major matrix, just big enough for the small Gram systems here.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Cholesky solve of (A + ridge I) X = B for symmetric positive definite A,
// shared factorization across the columns of B. Returns false when a pivot
// collapses; cond_estimate reports (max pivot / min pivot)^2.
inline bool cholesky_solve(Matrix A, double ridge,
                           std::vector<std::vector<double>>& b,
                           double* cond_estimate = nullptr) {
  const std::size_t n = A.rows;
  for (std::size_t i = 0; i < n; ++i) A(i, i) += ridge;

  double min_piv = 0.0, max_piv = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = A(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= A(j, k) * A(j, k);
    if (!(d > 0.0)) {
      if (cond_estimate) *cond_estimate = std::numeric_limits<double>::infinity();
      return false;
    }
    const double l = std::sqrt(d);
    A(j, j) = l;
    min_piv = (j == 0) ? l : std::min(min_piv, l);
    max_piv = (j == 0) ? l : std::max(max_piv, l);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = A(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= A(i, k) * A(j, k);
      A(i, j) = s / l;
    }
  }
  if (cond_estimate)
    *cond_estimate = min_piv > 0.0 ? (max_piv / min_piv) * (max_piv / min_piv)
                                   : std::numeric_limits<double>::infinity();

  for (auto& rhs : b) {
    // forward substitution L y = rhs
    for (std::size_t i = 0; i < n; ++i) {
      double s = rhs[i];
      for (std::size_t k = 0; k < i; ++k) s -= A(i, k) * rhs[k];
      rhs[i] = s / A(i, i);
    }
    // back substitution L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
      double s = rhs[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= A(k, ii) * rhs[k];
      rhs[ii] = s / A(ii, ii);
    }
  }
  return true;
}

}  // namespace fcur
