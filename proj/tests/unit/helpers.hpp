#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ellstar/functional.hpp"

namespace ellstar::test {

/// Single-component state with f(r) = profile(r).
inline FieldState sampled_state(const RadialGrid& grid, int ell,
                                const std::function<cplx(double)>& profile,
                                double target_N = 1.0) {
  ComplexFunction f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = profile(grid.node(i));
  return FieldState(grid, {Component{{ell, target_N}, std::move(f)}});
}

/// Multiplies every component by a constant so that its charge equals `N`.
inline void normalize_to(FieldState& state, double N) {
  const auto q = charges(state);
  for (std::size_t j = 0; j < state.size(); ++j) {
    const double s = std::sqrt(N / q[j]);
    for (auto& v : state[j].f.values()) v *= s;
  }
}

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace ellstar::test
