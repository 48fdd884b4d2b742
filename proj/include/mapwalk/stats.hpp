#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace mapwalk::stats {

struct ChiSquare {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  // Fewer than two populated categories: nothing to test.
  bool degenerate = false;
  // An observation fell in a cell of zero expected probability.
  bool impossible_cell = false;
};

inline double chi_square_sf(double statistic, std::size_t df) {
  if (df == 0) return 1.0;
  if (!(statistic < std::numeric_limits<double>::infinity())) return 0.0;
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(df));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

// Goodness of fit of counts against cell probabilities.
inline ChiSquare goodness_of_fit(std::span<const std::size_t> observed, std::span<const double> probs) {
  ChiSquare out;
  std::size_t total = 0;
  for (std::size_t c : observed) total += c;
  std::size_t live = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (probs[i] <= 0.0) {
      if (observed[i] != 0) out.impossible_cell = true;
      continue;
    }
    ++live;
    const double expected = probs[i] * static_cast<double>(total);
    const double d = static_cast<double>(observed[i]) - expected;
    out.statistic += d * d / expected;
  }
  if (live <= 1) {
    out.degenerate = true;
    out.p_value = out.impossible_cell ? 0.0 : 1.0;
    return out;
  }
  out.df = live - 1;
  out.p_value = out.impossible_cell ? 0.0 : chi_square_sf(out.statistic, out.df);
  return out;
}

// Pearson test of independence on an r x c contingency table. Empty rows
// and columns are dropped before counting degrees of freedom.
inline ChiSquare independence(const std::vector<std::vector<std::size_t>>& table) {
  ChiSquare out;
  const std::size_t rows = table.size();
  const std::size_t cols = rows ? table[0].size() : 0;
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      row_sum[i] += static_cast<double>(table[i][j]);
      col_sum[j] += static_cast<double>(table[i][j]);
      total += static_cast<double>(table[i][j]);
    }
  }
  std::size_t live_rows = 0, live_cols = 0;
  for (double r : row_sum) live_rows += r > 0;
  for (double c : col_sum) live_cols += c > 0;
  if (live_rows <= 1 || live_cols <= 1) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_sum[i] == 0) continue;
    for (std::size_t j = 0; j < cols; ++j) {
      if (col_sum[j] == 0) continue;
      const double expected = row_sum[i] * col_sum[j] / total;
      const double d = static_cast<double>(table[i][j]) - expected;
      out.statistic += d * d / expected;
    }
  }
  out.df = (live_rows - 1) * (live_cols - 1);
  out.p_value = chi_square_sf(out.statistic, out.df);
  return out;
}

}  // namespace mapwalk::stats
