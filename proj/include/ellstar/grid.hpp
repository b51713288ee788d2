#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ellstar {

using cplx = std::complex<double>;

/// Cell-centered uniform radial mesh r_i = (i + 1/2) h, h = r_max / n.
///
/// The weights w_i = r_i^2 h realize the midpoint rule for
/// \f$\int_0^{r_{max}} \phi(r) r^2 dr\f$. No node sits on r = 0, so 1/r and
/// the centrifugal term are finite everywhere on the mesh.
///
/// Copies share one immutable node/weight table.
class RadialGrid {
 public:
  RadialGrid(double r_max, std::size_t n_points);

  double r_max() const { return data_->r_max; }
  std::size_t size() const { return data_->nodes.size(); }
  double spacing() const { return data_->h; }
  double node(std::size_t i) const { return data_->nodes[i]; }
  std::span<const double> nodes() const { return data_->nodes; }
  std::span<const double> weights() const { return data_->weights; }

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) {
    return a.data_ == b.data_ ||
           (a.data_->r_max == b.data_->r_max && a.size() == b.size());
  }

 private:
  struct Data {
    double r_max;
    double h;
    std::vector<double> nodes;
    std::vector<double> weights;
  };
  std::shared_ptr<const Data> data_;
};

inline constexpr std::size_t kMinGridPoints = 16;

RadialGrid make_grid(double r_max, std::size_t n_points);

/// Values of a radial profile, one per grid node.
template <typename T>
class RadialFunction {
 public:
  using value_type = T;

  explicit RadialFunction(RadialGrid grid);
  RadialFunction(RadialGrid grid, std::vector<T> values);

  const RadialGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }
  T operator[](std::size_t i) const { return values_[i]; }
  T& operator[](std::size_t i) { return values_[i]; }

 private:
  RadialGrid grid_;
  std::vector<T> values_;
};

using RealFunction = RadialFunction<double>;
using ComplexFunction = RadialFunction<cplx>;

/// Midpoint quadrature \f$\sum_i w_i f(r_i)\f$.
double integrate(std::span<const double> f, const RadialGrid& grid);
cplx integrate(std::span<const cplx> f, const RadialGrid& grid);

template <typename T>
T integrate(const RadialFunction<T>& f) {
  return integrate(f.values(), f.grid());
}

/// g = r f, the reduced variable in which the radial Laplacian is a plain
/// second derivative.
template <typename T>
RadialFunction<T> to_reduced(const RadialFunction<T>& f);
template <typename T>
RadialFunction<T> from_reduced(const RadialFunction<T>& g);

void require_same_grid(const RadialGrid& a, const RadialGrid& b);

}  // namespace ellstar
