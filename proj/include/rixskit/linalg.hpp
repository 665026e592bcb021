// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace rixs::detail {

// Solves the dense n x n system A x = b in place (A row-major) by Gaussian
// elimination with partial pivoting. Returns false on a (near-)singular
// matrix. Sized for the tiny systems used here (n <= 4).
inline bool solve_dense(std::vector<double> a, std::vector<double> b,
                        std::size_t n, std::vector<double>& x) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (!(best > 0.0) || !std::isfinite(best)) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c)
        std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    double inv = 1.0 / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double factor = a[r * n + col] * inv;
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t row = n; row-- > 0;) {
    double acc = b[row];
    for (std::size_t c = row + 1; c < n; ++c) acc -= a[row * n + c] * x[c];
    x[row] = acc / a[row * n + row];
    if (!std::isfinite(x[row])) return false;
  }
  return true;
}

// Inverse of a symmetric positive-definite n x n matrix via column solves;
// used for parameter covariance estimates. Returns false when singular.
inline bool invert_dense(const std::vector<double>& a, std::size_t n,
                         std::vector<double>& inv) {
  inv.assign(n * n, 0.0);
  std::vector<double> e(n), col;
  for (std::size_t j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    if (!solve_dense(a, e, n, col)) return false;
    for (std::size_t i = 0; i < n; ++i) inv[i * n + j] = col[i];
  }
  return true;
}

}  // namespace rixs::detail
