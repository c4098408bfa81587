#pragma once

#include "abnet/linalg.hpp"

#include <optional>
#include <vector>

namespace abnet {

/// Exact phase-1 simplex: returns some y >= 0 with A y = b, or nullopt if none
/// exists. Bland's rule guarantees termination.
inline std::optional<std::vector<Rational>> find_feasible(const RatMatrix& a, std::vector<Rational> b) {
  const std::size_t m = a.rows(), n = a.cols();
  if (b.size() != m) throw InvalidArgument("find_feasible: right-hand side has wrong dimension");
  const std::size_t width = n + m + 1;  // originals, artificials, rhs
  RatMatrix t(m, width);
  for (std::size_t i = 0; i < m; ++i) {
    const Rational sign = b[i] < 0 ? Rational(-1) : Rational(1);
    for (std::size_t j = 0; j < n; ++j) t(i, j) = sign * a(i, j);
    t(i, n + i) = 1;
    t(i, n + m) = sign * b[i];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
  // Reduced costs of the phase-1 objective (sum of artificials).
  std::vector<Rational> cost(width, Rational(0));
  for (std::size_t j = 0; j < width; ++j) {
    if (j >= n && j < n + m) continue;
    for (std::size_t i = 0; i < m; ++i) cost[j] -= t(i, j);
  }
  while (true) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j)
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    if (enter == width) break;
    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t(i, enter) <= 0) continue;
      const Rational ratio = t(i, n + m) / t(i, enter);
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen in phase 1
    const Rational pivot = t(leave, enter);
    for (std::size_t j = 0; j < width; ++j) t(leave, j) /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || t(i, enter) == 0) continue;
      const Rational f = t(i, enter);
      for (std::size_t j = 0; j < width; ++j) t(i, j) -= f * t(leave, j);
    }
    const Rational f = cost[enter];
    for (std::size_t j = 0; j < width; ++j) cost[j] -= f * t(leave, j);
    basis[leave] = enter;
  }
  if (cost[n + m] != 0) return std::nullopt;  // -cost[rhs] is the residual infeasibility
  std::vector<Rational> y(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) y[basis[i]] = t(i, n + m);
  return y;
}

}  // namespace abnet
