#include "ellstar/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ellstar/errors.hpp"

namespace ellstar {

std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::none: return "none";
    case PotentialKind::point_mass: return "point_mass";
    case PotentialKind::plummer: return "plummer";
  }
  return "none";
}

PotentialKind parse_potential_kind(std::string_view name) {
  if (name == "none") return PotentialKind::none;
  if (name == "point_mass") return PotentialKind::point_mass;
  if (name == "plummer") return PotentialKind::plummer;
  throw ConfigError("unknown potential kind '" + std::string(name) +
                    "' (expected none, point_mass or plummer)");
}

ExternalPotential ExternalPotential::point_mass(double m) {
  ExternalPotential p{PotentialKind::point_mass, m, 1.0};
  p.validate();
  return p;
}

ExternalPotential ExternalPotential::plummer(double m, double b) {
  ExternalPotential p{PotentialKind::plummer, m, b};
  p.validate();
  return p;
}

void ExternalPotential::validate() const {
  if (!(mass >= 0.0) || !std::isfinite(mass)) {
    throw ConfigError("potential: mass must be non-negative, got " + std::to_string(mass));
  }
  if (kind == PotentialKind::plummer && !(softening > 0.0)) {
    throw ConfigError("potential: plummer softening must be positive, got " +
                      std::to_string(softening));
  }
}

double ExternalPotential::operator()(double r) const {
  switch (kind) {
    case PotentialKind::none: return 0.0;
    case PotentialKind::point_mass: return -mass / r;
    case PotentialKind::plummer: return -mass / std::sqrt(r * r + softening * softening);
  }
  return 0.0;
}

double ExternalPotential::regular_value_at_origin() const {
  return kind == PotentialKind::plummer ? -mass / softening : 0.0;
}

ExternalPotential ExternalPotential::scaled(double lambda) const {
  ExternalPotential p = *this;
  p.mass *= lambda;
  if (kind == PotentialKind::plummer) p.softening /= lambda;
  return p;
}

RealFunction sample_external(const ExternalPotential& pot, const RadialGrid& grid) {
  RealFunction v(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = pot(grid.node(i));
  return v;
}

GravPotential solve_poisson(std::span<const double> density, const RadialGrid& grid) {
  const std::size_t n = grid.size();
  if (density.size() != n) throw ShapeError("solve_poisson: density size mismatch");
  const auto r = grid.nodes();
  const auto w = grid.weights();

  std::vector<double> mass(n);  // n_i w_i, clipped at round-off negatives
  for (std::size_t i = 0; i < n; ++i) {
    if (density[i] < -1e-14) {
      throw DomainError("solve_poisson: negative density " + std::to_string(density[i]) +
                        " at r = " + std::to_string(r[i]));
    }
    mass[i] = std::max(density[i], 0.0) * w[i];
  }

  std::vector<double> u(n);
  // outer part, accumulated from the boundary inwards
  double outer = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    u[i] = -outer;
    outer += mass[i] / r[i];
  }
  double inner = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    inner += mass[i];
    u[i] -= inner / r[i];
  }
  GravPotential out{RealFunction(grid, std::move(u)), 4.0 * std::numbers::pi * inner};
  return out;
}

GravPotential solve_poisson(const RealFunction& density) {
  return solve_poisson(density.values(), density.grid());
}

}  // namespace ellstar
