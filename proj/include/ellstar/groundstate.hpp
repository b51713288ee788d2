#pragma once

#include <span>
#include <string>
#include <vector>

#include "ellstar/functional.hpp"
#include "ellstar/grid.hpp"
#include "ellstar/potential.hpp"

namespace ellstar {

struct SolverParams {
  double dtau = 0.0;  // initial imaginary-time step; 0 picks one from the problem scale
  int max_iterations = 5000;
  double energy_tolerance = 1e-12;  // relative energy change per step
  double residual_tolerance = 1e-8;
  double mixing = 1.0;  // under-relaxation of U between steps, in (0, 1]
  bool self_gravity = true;
  bool seed_check = false;  // rerun from a second initial guess and compare energies

  void validate() const;
};

/// Converged minimizer of E at fixed charges.
struct StationaryState {
  FieldState state;
  ExternalPotential potential;
  std::vector<double> omegas;
  EnergyBreakdown energy;
  double residual = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;
  std::vector<double> energy_history;  // E after every accepted step, starting with the guess

  std::vector<double> charges() const { return ellstar::charges(state); }
};

/// Rayleigh quotients omega_j = <f_j, H_j f_j> / <f_j, f_j> of the mean-field
/// Hamiltonian H_j = -Delta_l + V + U[n]. Throws DomainError on a zero component.
std::vector<double> extract_omega(const FieldState& state, const ExternalPotential& pot,
                                  bool self_gravity = true);

/// Strong-form stationarity residual sum_j |H_j g_j - omega_j g_j| / (|omega_j| |g_j|).
double residual(const FieldState& state, const ExternalPotential& pot,
                bool self_gravity = true);

/// Normalized imaginary-time flow. Each step solves
///   (1 + dtau H_j[U]) g_j' = g_j
/// with U from the current density, then rescales every component back to
/// its charge. Steps that would raise the energy are retried with half the
/// step size.
///
/// Throws NonConvergenceError (carrying the last residual) if the tolerances
/// are not met within max_iterations and BlowupError on non-finite values.
StationaryState minimize(std::span<const ComponentSpec> components, const ExternalPotential& pot,
                         const RadialGrid& grid, const SolverParams& params = {});

/// Same, starting from a given state instead of the Gaussian guess.
StationaryState minimize_from(const FieldState& initial, const ExternalPotential& pot,
                              const SolverParams& params = {});

/// Gaussian initial guess f_j = r^l exp(-r^2 / (2 width^2)), normalized to N_j.
FieldState initial_guess(std::span<const ComponentSpec> components, const RadialGrid& grid,
                         double width);

/// Picks r_max so that every component has decayed by exp(-decay_lengths)
/// at the boundary, using coarse solves to estimate the frequencies.
double auto_radius(std::span<const ComponentSpec> components, const ExternalPotential& pot,
                   bool self_gravity = true, double decay_lengths = 33.0);

/// Largest |f_j| over the outer 2% of the grid relative to the peak of f_j.
double boundary_tail(const FieldState& state);

}  // namespace ellstar
