#pragma once

#include <span>
#include <vector>

#include "ellstar/functional.hpp"
#include "ellstar/grid.hpp"
#include "ellstar/potential.hpp"

namespace ellstar {

/// Stationary single-ell profile from the shooting oracle.
struct ShootResult {
  int ell = 0;
  RealFunction profile;  // f(r), with f ~ central_value * r^l at the origin
  double omega = 0.0;
  int nodes = 0;
  double N_achieved = 0.0;
  double central_value = 0.0;
  EnergyBreakdown energy;
  ExternalPotential potential;
  bool self_gravity = true;
  bool converged = false;
  int iterations = 0;

  FieldState to_state() const;
};

struct ShootOptions {
  int max_iterations = 400;
  double potential_tolerance = 1e-10;  // relative sup-norm change of U
  double mixing = 0.5;
};

/// Self-consistent radial eigenfunction with exactly `n_nodes` interior nodes.
///
/// The eigenvalue for a frozen U is located by bisection on the node count
/// of the outward Numerov solution (Sturm), which is started from the
/// Frobenius series g = c r^{l+1}(1 + c_1 r + ...). The profile is assembled
/// from the outward solution up to the last classical turning point and an
/// inward solution from r_max. With self-gravity, U is recomputed from
/// (2l+1) f^2 / (4 pi) by fourth-order cumulative quadrature and mixed until
/// it stops changing.
///
/// Throws BracketError if no eigenvalue with the requested node count lies
/// below zero and NonConvergenceError if the potential iteration stalls.
ShootResult shoot_stationary(int ell, int n_nodes, const ExternalPotential& pot,
                             bool self_gravity, double central_value, const RadialGrid& grid,
                             const ShootOptions& options = {});

/// Linear eigenproblem with a frozen self-potential U (empty span: U = 0).
ShootResult solve_frozen(int ell, int n_nodes, const ExternalPotential& pot,
                         std::span<const double> U, double central_value,
                         const RadialGrid& grid);

/// shoot_stationary on a grid of `n_points` nodes whose radius is adjusted
/// until the profile has decayed over ~30 decay lengths past its last node.
ShootResult shoot_auto_grid(int ell, int n_nodes, const ExternalPotential& pot,
                            bool self_gravity, double central_value, std::size_t n_points = 16384,
                            const ShootOptions& options = {});

/// Solves at central value 1 on a grid sized to the solution, then reaches
/// charge `target_N` on `grid`. Without an external potential this is a pure
/// rescaling; otherwise the central value is adjusted by secant iteration.
ShootResult shoot_to_charge(int ell, int n_nodes, const ExternalPotential& pot,
                            double target_N, const RadialGrid& grid,
                            const ShootOptions& options = {});

/// u -> lambda^2 u(lambda x): N -> lambda N, omega -> lambda^2 omega,
/// energies -> lambda^3, and the external mass -> lambda M. The profile is
/// resampled on the same grid or on `target`. Throws DomainError for lambda <= 0.
ShootResult rescale_solution(const ShootResult& result, double lambda);
ShootResult rescale_solution(const ShootResult& result, double lambda, const RadialGrid& target);

/// Strict sign changes between consecutive nodes, ignoring entries below
/// 1e-12 of the largest magnitude.
int count_nodes(std::span<const double> f);
int count_nodes(const RealFunction& f);

/// Fourth-order cumulative quadrature for U = Delta^{-1} n, independent of
/// the midpoint rule used by solve_poisson. Returns U on the nodes.
std::vector<double> poisson_high_order(std::span<const double> density, const RadialGrid& grid);

}  // namespace ellstar
