#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ellstar/groundstate.hpp"

namespace ellstar {

/// Outcome of one identity check; pass <=> residual <= tolerance.
struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

CheckReport make_report(std::string name, double lhs, double rhs, double residual,
                        double tolerance, std::string detail = {});

/// Ground-state solver used by the multi-solve checks.
using Solver =
    std::function<StationaryState(std::span<const ComponentSpec>, const ExternalPotential&)>;

/// minimize on an automatically sized grid with `n_points` nodes.
Solver make_solver(std::size_t n_points, SolverParams params = {});

/// 2T - L - D = 0, residual relative to |E|. Requires V homogeneous of
/// degree -1 (none or point_mass); throws InapplicableCheckError otherwise.
CheckReport virial_check(const StationaryState& s, double tolerance = 1e-6);

/// E = -T, the consequence of the virial relation.
CheckReport virial_energy_check(const StationaryState& s, double tolerance = 1e-6);

/// (1/2) sum_j N_j omega_j = E - D, residual relative to |E|.
CheckReport omega_energy_check(const StationaryState& s, double tolerance = 1e-6);

/// Every component free of interior sign changes.
CheckReport nodeless_check(const StationaryState& s);

/// E(M, N) = N^3 E(M/N, 1) and omega(M, N) = N^2 omega(M/N, 1) for
/// N = lambda * base_N; at M = 0 also omega(0, 1) = 6 E(0, 1). The
/// (M/N, 1) problem is solved with `reference`, which should discretize
/// differently from `solve` so that the two sides are independent.
std::vector<CheckReport> scaling_check(int ell, double M, double base_N,
                                       std::span<const double> lambdas, const Solver& solve,
                                       const Solver& reference, double tolerance = 1e-3);

/// omega(M, N) -> -M^2 / (4 (l+1)^2) along a decreasing N sequence: one
/// report per N (the last one at `tolerance`) and one for monotone approach.
std::vector<CheckReport> small_N_limit_check(int ell, double M, std::span<const double> N_seq,
                                             const Solver& solve, double tolerance = 0.01);

/// (omega(M, N) - omega(0, N)) / N^2 decreasing along an increasing N
/// sequence. Qualitative: no rate is asserted.
CheckReport large_N_trend_check(int ell, double M, std::span<const double> N_seq,
                                const Solver& solve);

struct SweepPoint {
  double M = 0.0;
  double N = 0.0;
  StationaryState state;
};

struct MonotonicitySweep {
  std::vector<double> M;
  std::vector<double> N;
  std::vector<std::vector<double>> E;  // E[iM][iN]
  CheckReport ordering;
  CheckReport negativity;
};

/// Ordering and sign checks on an already computed E[iM][iN] table.
MonotonicitySweep check_monotonicity(int ell, std::vector<double> M, std::vector<double> N,
                                     std::vector<std::vector<double>> E, double slack = 1e-8);

/// E(M', N) <= E(M, N) for M' >= M, E(M, N') < E(M, N) for N' > N (with a
/// relative slack) and E < 0 everywhere.
MonotonicitySweep monotonicity_sweep(int ell, std::span<const double> M_grid,
                                     std::span<const double> N_grid, const Solver& solve,
                                     double slack = 1e-8);

}  // namespace ellstar
