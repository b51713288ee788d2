#include "ellstar/tridiagonal.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "ellstar/errors.hpp"

namespace ellstar {

template <typename T>
void SymTridiagonal::apply(std::span<const T> x, std::span<T> y) const {
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    T acc = diag[i] * x[i];
    if (i > 0) acc += off[i - 1] * x[i - 1];
    if (i + 1 < n) acc += off[i] * x[i + 1];
    y[i] = acc;
  }
}

template void SymTridiagonal::apply(std::span<const double>,
                                    std::span<double>) const;
template void SymTridiagonal::apply(std::span<const cplx>,
                                    std::span<cplx>) const;

std::size_t SymTridiagonal::count_below(double shift) const {
  const std::size_t n = diag.size();
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double coupling = i > 0 ? off[i - 1] * off[i - 1] / d : 0.0;
    d = diag[i] - shift - coupling;
    if (d == 0.0) d = -std::numeric_limits<double>::epsilon() * (std::abs(diag[i]) + 1.0);
    if (d < 0.0) ++count;
  }
  return count;
}

bool SymTridiagonal::shifted_identity_is_positive(double scale) const {
  const std::size_t n = diag.size();
  double d = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double o = scale * (i > 0 ? off[i - 1] : 0.0);
    d = 1.0 + scale * diag[i] - (i > 0 ? o * o / d : 0.0);
    if (!(d > 0.0)) return false;
  }
  return true;
}

namespace {

template <typename T>
void thomas(const SymTridiagonal& a, T alpha, T beta, std::span<T> rhs) {
  const std::size_t n = a.size();
  if (rhs.size() != n) throw ShapeError("tridiagonal solve: size mismatch");
  std::vector<T> c(n);
  T denom = alpha + beta * a.diag[0];
  if (std::abs(denom) == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
  c[0] = n > 1 ? beta * a.off[0] / denom : T{};
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    const T lower = beta * a.off[i - 1];
    denom = alpha + beta * a.diag[i] - lower * c[i - 1];
    if (std::abs(denom) == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
    c[i] = i + 1 < n ? beta * a.off[i] / denom : T{};
    rhs[i] = (rhs[i] - lower * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

}  // namespace

void solve_shifted(const SymTridiagonal& a, double alpha, double beta,
                   std::span<double> rhs) {
  thomas<double>(a, alpha, beta, rhs);
}

void solve_shifted(const SymTridiagonal& a, cplx alpha, cplx beta,
                   std::span<cplx> rhs) {
  thomas<cplx>(a, alpha, beta, rhs);
}

}  // namespace ellstar
