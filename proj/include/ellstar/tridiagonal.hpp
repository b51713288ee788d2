#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ellstar/grid.hpp"

namespace ellstar {

/// Real symmetric tridiagonal matrix; `off[i]` couples rows i and i+1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }

  /// y = A x
  template <typename T>
  void apply(std::span<const T> x, std::span<T> y) const;

  /// Number of eigenvalues strictly below `shift` (Sylvester inertia of the
  /// LDL^T factorization of A - shift).
  std::size_t count_below(double shift) const;

  /// True if every LDL^T pivot of I + scale*A is positive.
  bool shifted_identity_is_positive(double scale) const;
};

/// Solves (alpha I + beta A) x = rhs in place for a symmetric tridiagonal A
/// with the Thomas algorithm. Throws NumericalError on a vanishing pivot.
void solve_shifted(const SymTridiagonal& a, double alpha, double beta,
                   std::span<double> rhs);
void solve_shifted(const SymTridiagonal& a, cplx alpha, cplx beta,
                   std::span<cplx> rhs);

}  // namespace ellstar
