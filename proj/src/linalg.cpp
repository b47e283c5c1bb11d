#include "kstab/linalg.hpp"

#include <utility>

namespace kstab {

std::optional<std::vector<Rational>> solve(RationalMatrix a, std::vector<Rational> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (sgn(a[r][col]) == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

Rational determinant(RationalMatrix a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (sgn(a[r][col]) == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

std::size_t rank(RationalMatrix a) {
  if (a.empty()) return 0;
  const std::size_t rows = a.size(), cols = a.front().size();
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t pivot = r;
    while (pivot < rows && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (sgn(a[i][col]) == 0) continue;
      const Rational f = a[i][col] / a[r][col];
      for (std::size_t c = col; c < cols; ++c) a[i][c] -= f * a[r][c];
    }
    ++r;
  }
  return r;
}

Inertia inertia(RationalMatrix a) {
  const std::size_t n = a.size();
  Inertia out;
  auto swap_index = [&](std::size_t i, std::size_t j) {
    std::swap(a[i], a[j]);
    for (auto& row : a) std::swap(row[i], row[j]);
  };
  // row/col i += row/col j, a congruence that keeps symmetry
  auto add_index = [&](std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < n; ++c) a[i][c] += a[j][c];
    for (std::size_t r = 0; r < n; ++r) a[r][i] += a[r][j];
  };

  for (std::size_t k = 0; k < n; ++k) {
    if (sgn(a[k][k]) == 0) {
      std::size_t j = k + 1;
      while (j < n && sgn(a[j][j]) == 0) ++j;
      if (j < n) {
        swap_index(k, j);
      } else {
        j = k + 1;
        while (j < n && sgn(a[k][j]) == 0) ++j;
        if (j == n) {
          ++out.zero;
          continue;
        }
        add_index(k, j);
      }
    }
    const Rational pivot = a[k][k];
    (sgn(pivot) > 0 ? out.positive : out.negative)++;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (sgn(a[r][k]) == 0) continue;
      const Rational f = a[r][k] / pivot;
      for (std::size_t c = k; c < n; ++c) a[r][c] -= f * a[k][c];
      a[r][k] = 0;
    }
    for (std::size_t c = k + 1; c < n; ++c) a[k][c] = 0;
  }
  return out;
}

}  // namespace kstab
