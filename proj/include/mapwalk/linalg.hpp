#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mapwalk/errors.hpp"
#include "mapwalk/measure.hpp"
#include "mapwalk/rational.hpp"

namespace mapwalk {

// Rank of a rational matrix, by exact elimination.
inline std::size_t exact_rank(RationalMatrix a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rows;
    for (std::size_t r = rank; r < rows; ++r) {
      if (a[r][c] != 0 && (pivot == rows || bit_size(a[r][c]) < bit_size(a[pivot][c]))) pivot = r;
    }
    if (pivot == rows) continue;
    std::swap(a[rank], a[pivot]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (a[r][c] == 0) continue;
      const Rational factor = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= factor * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

// Solves A x = b exactly. A must be square and nonsingular.
// Pivots are chosen by smallest numerator+denominator bit size.
inline std::vector<Rational> solve_exact(RationalMatrix a, std::vector<Rational> b) {
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = n;
    for (std::size_t r = c; r < n; ++r) {
      if (a[r][c] != 0 && (pivot == n || bit_size(a[r][c]) < bit_size(a[pivot][c]))) pivot = r;
    }
    if (pivot == n) throw StructuralError("singular linear system");
    std::swap(a[c], a[pivot]);
    std::swap(b[c], b[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational factor = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= factor * a[c][k];
      b[r] -= factor * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

// The unique probability vector pi with pi P = pi for a row-stochastic P.
// Throws StructuralError when the stationary law is not unique.
inline std::vector<Rational> stationary_distribution(const RationalMatrix& p) {
  const std::size_t n = p.size();
  if (n == 0) throw InputError("empty transition matrix");
  // (P^T - I) pi = 0 has a one-dimensional kernel iff the law is unique.
  RationalMatrix a(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i].size() != n) throw InputError("transition matrix is not square");
    for (std::size_t j = 0; j < n; ++j) a[j][i] = p[i][j] - (i == j ? 1 : 0);
  }
  const std::size_t r = exact_rank(a);
  if (r != n - 1) {
    throw StructuralError("stationary law is not unique: rank " + std::to_string(r) + " for " +
                          std::to_string(n) + " states");
  }
  // Replace the equation with the largest index by the normalization.
  // Any single row of P^T - I is redundant, so this keeps the system regular.
  std::vector<Rational> b(n, Rational(0));
  a[n - 1].assign(n, Rational(1));
  b[n - 1] = 1;
  return solve_exact(std::move(a), std::move(b));
}

}  // namespace mapwalk
