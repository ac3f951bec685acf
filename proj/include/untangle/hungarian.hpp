#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "untangle/error.hpp"

namespace untangle {

//
// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
// row/column potentials, O(n^3)).
//
// Returns assignment[row] = column.
//
inline std::vector<std::size_t> hungarian_min_cost(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  for (const auto& row : cost)
    if (row.size() != n) throw Error("assignment cost matrix must be square");
  if (n == 0) return {};

  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is a virtual start column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[owner[j] - 1] = j - 1;
  return assignment;
}

/// Maximum-weight perfect matching, solved as min-cost on negated weights.
inline std::vector<std::size_t> hungarian_max_weight(const std::vector<std::vector<double>>& weight) {
  std::vector<std::vector<double>> cost = weight;
  for (auto& row : cost)
    for (auto& w : row) w = -w;
  return hungarian_min_cost(cost);
}

}  // namespace untangle
