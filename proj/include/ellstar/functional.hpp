#pragma once

#include <span>
#include <vector>

#include "ellstar/grid.hpp"
#include "ellstar/potential.hpp"
#include "ellstar/tridiagonal.hpp"

namespace ellstar {

/// One irreducible multiplet: angular momentum ell with prescribed charge N.
struct ComponentSpec {
  int ell = 0;
  double target_N = 1.0;
};

/// Throws ConfigError unless the list is non-empty, every ell >= 0, the ell
/// values are strictly increasing and (if `require_positive_charge`) N > 0.
void validate_components(std::span<const ComponentSpec> specs,
                         bool require_positive_charge = true);

struct Component {
  ComponentSpec spec;
  ComplexFunction f;  // radial profile f_j(r); the multiplet is f_j Y^{ell_j}
};

/// Multi-component radial state u = (f_1 Y^{l_1}, ..., f_r Y^{l_r}).
class FieldState {
 public:
  FieldState(RadialGrid grid, std::vector<Component> components);

  static FieldState zeros(const RadialGrid& grid, std::span<const ComponentSpec> specs);

  const RadialGrid& grid() const { return grid_; }
  std::size_t size() const { return components_.size(); }
  const Component& operator[](std::size_t j) const { return components_[j]; }
  Component& operator[](std::size_t j) { return components_[j]; }
  auto begin() const { return components_.begin(); }
  auto end() const { return components_.end(); }
  auto begin() { return components_.begin(); }
  auto end() { return components_.end(); }

  std::vector<ComponentSpec> specs() const;

  /// Reduced profile g_j = r f_j.
  std::vector<cplx> reduced(std::size_t j) const;
  void set_reduced(std::size_t j, std::span<const cplx> g);

 private:
  RadialGrid grid_;
  std::vector<Component> components_;
};

void require_same_structure(const FieldState& a, const FieldState& b);

struct EnergyBreakdown {
  double T = 0.0;  // kinetic, (1/2) \int |grad u|^2
  double L = 0.0;  // external, (1/2) \int (-V) n
  double D = 0.0;  // self-gravity, -(1/4) \int U n
  double E = 0.0;  // T - L - D
};

// --- discrete radial operators on g = r f -------------------------------
//
// The kinetic operator is -d^2/dr^2 + l(l+1)/r^2 with three-point
// differences. The ghost value across the origin is g(-h/2) = (-1)^{l+1} g(h/2)
// (parity of r^{l+1}); at r_max the ghost enforces g(r_max) = 0.

SymTridiagonal kinetic_operator(const RadialGrid& grid, int ell);

/// Diagonal of the external potential acting on g. For a point mass the
/// first node also carries the cusp correction of the ghost value,
/// g(-h/2)/g(h/2) = (-1)^{l+1} (1 + M h / (2(l+1))), which restores second
/// order accuracy of the Coulomb problem.
std::vector<double> external_diagonal(const RadialGrid& grid, int ell,
                                      const ExternalPotential& pot);

/// H_l = kinetic + external + U.
SymTridiagonal hamiltonian(const RadialGrid& grid, int ell, const ExternalPotential& pot,
                           std::span<const double> U);

// --- functionals ----------------------------------------------------------

/// n(r) = sum_j (2 l_j + 1)/(4 pi) |f_j(r)|^2
RealFunction density(const FieldState& state);

/// N_j = (2 l_j + 1) \int |f_j|^2 r^2 dr
std::vector<double> charges(const FieldState& state);

double kinetic(const FieldState& state);
double external_energy(const FieldState& state, const ExternalPotential& pot);
double self_energy(const FieldState& state);
double self_energy(const RealFunction& density, const GravPotential& grav);
EnergyBreakdown total_energy(const FieldState& state, const ExternalPotential& pot);

/// ||u||_{H^1}^2 = ||u||_2^2 + 2 T[u]
double h1_norm(const FieldState& state);

/// min over per-component phases theta_j of ||a - e^{i theta} b||_{H^1}.
/// The optimal phase of each component is -arg <a_j, b_j>_{H^1}.
double h1_distance_mod_phase(const FieldState& a, const FieldState& b);

/// Complex H^1 inner product <a_j, b_j> of one component (antilinear in a).
cplx h1_inner(const FieldState& a, const FieldState& b, std::size_t j);

// --- resampling -------------------------------------------------------------

/// Cubic Lagrange interpolation of a profile f ~ r^l at radius r >= 0,
/// using the parity f(-r) = (-1)^l f(r) near the origin and zero beyond r_max.
template <typename T>
T interpolate(const RadialFunction<T>& f, int ell, double r);

/// Returns lambda^power f(lambda r) sampled on the grid of f.
template <typename T>
RadialFunction<T> resample_scaled(const RadialFunction<T>& f, int ell, double lambda,
                                  double power);

/// Same resampling onto a different grid.
template <typename T>
RadialFunction<T> resample_scaled(const RadialFunction<T>& f, int ell, double lambda,
                                  double power, const RadialGrid& target);

/// Applies u -> lambda^power u(lambda x) to every component.
FieldState rescale_state(const FieldState& state, double lambda, double power);

}  // namespace ellstar
