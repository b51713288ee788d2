#pragma once

#include <string>
#include <string_view>

#include "ellstar/grid.hpp"

namespace ellstar {

enum class PotentialKind { none, point_mass, plummer };

std::string_view to_string(PotentialKind kind);
PotentialKind parse_potential_kind(std::string_view name);

/// Spherically symmetric, attractive, time-independent external potential.
///
///  - point_mass: V = -M / r (central black hole)
///  - plummer:    V = -M / sqrt(r^2 + b^2) (softened mass, axis ratio zero)
struct ExternalPotential {
  PotentialKind kind = PotentialKind::none;
  double mass = 0.0;
  double softening = 1.0;

  static ExternalPotential none() { return {}; }
  static ExternalPotential point_mass(double m);
  static ExternalPotential plummer(double m, double b);

  double operator()(double r) const;

  /// Checks M >= 0 and b > 0 for plummer; throws ConfigError otherwise.
  void validate() const;

  /// Potential of the mass-scaled problem: under u -> lambda^2 u(lambda x)
  /// the mass scales as lambda M (and the softening as b / lambda).
  ExternalPotential scaled(double lambda) const;

  /// Coulomb strength of the 1/r singularity at the origin (0 unless point_mass).
  double coulomb_strength() const {
    return kind == PotentialKind::point_mass ? mass : 0.0;
  }
  /// Regular part of V at r = 0.
  double regular_value_at_origin() const;
};

RealFunction sample_external(const ExternalPotential& pot, const RadialGrid& grid);

/// Gravitational potential U = Delta^{-1} n with U -> 0 at infinity.
struct GravPotential {
  RealFunction U;
  double total_source = 0.0;  // \int n dx
};

/// Solves Delta U = n for a radial density with the two-sided Green's
/// function form
///   U(r) = -(1/r) \int_0^r n s^2 ds - \int_r^{r_max} n s ds,
/// evaluated with midpoint prefix sums (the self cell is counted in the inner
/// integral). The resulting U is the exact inverse of the three-point
/// Laplacian on r U, so Delta_h U = n holds node by node.
GravPotential solve_poisson(std::span<const double> density, const RadialGrid& grid);
GravPotential solve_poisson(const RealFunction& density);

}  // namespace ellstar
