#include "ellstar/grid.hpp"

#include <cmath>
#include <string>

#include "ellstar/errors.hpp"

namespace ellstar {

RadialGrid::RadialGrid(double r_max, std::size_t n_points) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw ConfigError("grid: r_max must be positive and finite, got " +
                      std::to_string(r_max));
  }
  if (n_points < kMinGridPoints) {
    throw ConfigError("grid: n_points must be at least " +
                      std::to_string(kMinGridPoints) + ", got " +
                      std::to_string(n_points));
  }
  Data d;
  d.r_max = r_max;
  d.h = r_max / static_cast<double>(n_points);
  d.nodes.resize(n_points);
  d.weights.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * d.h;
    d.nodes[i] = r;
    d.weights[i] = r * r * d.h;
  }
  data_ = std::make_shared<const Data>(std::move(d));
}

RadialGrid make_grid(double r_max, std::size_t n_points) {
  return RadialGrid(r_max, n_points);
}

void require_same_grid(const RadialGrid& a, const RadialGrid& b) {
  if (!(a == b)) {
    throw ShapeError("radial functions live on different grids");
  }
}

namespace {

template <typename T>
bool all_finite(const std::vector<T>& v) {
  for (const auto& x : v) {
    if constexpr (std::is_same_v<T, cplx>) {
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    } else {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

template <typename T>
T integrate_impl(std::span<const T> f, const RadialGrid& grid) {
  if (f.size() != grid.size()) {
    throw ShapeError("integrate: " + std::to_string(f.size()) +
                     " samples on a grid of " + std::to_string(grid.size()));
  }
  const auto w = grid.weights();
  T sum{};
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i];
  return sum;
}

}  // namespace

template <typename T>
RadialFunction<T>::RadialFunction(RadialGrid grid)
    : grid_(std::move(grid)), values_(grid_.size(), T{}) {}

template <typename T>
RadialFunction<T>::RadialFunction(RadialGrid grid, std::vector<T> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ShapeError("radial function has " + std::to_string(values_.size()) +
                     " values for a grid of " + std::to_string(grid_.size()));
  }
  if (!all_finite(values_)) {
    throw DomainError("radial function has non-finite values");
  }
}

double integrate(std::span<const double> f, const RadialGrid& grid) {
  return integrate_impl(f, grid);
}

cplx integrate(std::span<const cplx> f, const RadialGrid& grid) {
  return integrate_impl(f, grid);
}

template <typename T>
RadialFunction<T> to_reduced(const RadialFunction<T>& f) {
  RadialFunction<T> g(f.grid());
  const auto r = f.grid().nodes();
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = r[i] * f[i];
  return g;
}

template <typename T>
RadialFunction<T> from_reduced(const RadialFunction<T>& g) {
  RadialFunction<T> f(g.grid());
  const auto r = g.grid().nodes();
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g[i] / r[i];
  return f;
}

template class RadialFunction<double>;
template class RadialFunction<cplx>;
template RadialFunction<double> to_reduced(const RadialFunction<double>&);
template RadialFunction<cplx> to_reduced(const RadialFunction<cplx>&);
template RadialFunction<double> from_reduced(const RadialFunction<double>&);
template RadialFunction<cplx> from_reduced(const RadialFunction<cplx>&);

}  // namespace ellstar
