#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ellstar/functional.hpp"
#include "ellstar/groundstate.hpp"
#include "ellstar/potential.hpp"

namespace ellstar {

struct StepOptions {
  bool self_gravity = true;
  int max_midpoint_iterations = 5;
  double midpoint_tolerance = 1e-12;  // relative sup change of U
};

struct StepInfo {
  int midpoint_iterations = 0;
  bool midpoint_converged = true;
};

/// One Crank-Nicolson step per component on g_j = r f_j,
///   (1 + i dt/2 H_j) g^{new} = (1 - i dt/2 H_j) g^{old},
/// with H_j built from the potential of the half-sum state (g^old + g^new)/2.
/// The midpoint is found by fixed-point iteration, which makes the scheme
/// the implicit midpoint rule: norms are conserved exactly and the energy
/// error is second order in dt.
FieldState step(const FieldState& state, const ExternalPotential& pot, double dt,
                const StepOptions& options = {}, StepInfo* info = nullptr);

struct EvolveOptions {
  StepOptions step;
  int output_every = 10;         // steps between recorded samples
  bool boundary_guard = true;    // stop when mass reaches the outer 10% of the grid
  double boundary_fraction = 1e-6;
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<std::vector<double>> norms;  // norms[k][j] at sample k
  std::vector<double> orbit_distance;      // empty without a reference state
  std::vector<double> mean_radius;
  int steps = 0;
  int unconverged_midpoints = 0;
  bool truncated = false;
  std::vector<std::string> warnings;
  FieldState final_state;
};

/// Repeated steps up to t_final, sampling every output_every steps (and at
/// the end). With a reference, records the H^1 distance modulo phase.
EvolutionTrace evolve(const FieldState& initial, const ExternalPotential& pot, double t_final,
                      double dt, const StationaryState* reference = nullptr,
                      const EvolveOptions& options = {});

enum class PerturbationKind { radial_bump, noise };

PerturbationKind parse_perturbation_kind(const std::string& name);
std::string to_string(PerturbationKind kind);

/// u* + v, with v a smooth profile of correct origin regularity per component,
/// L^2-orthogonal to u*_j and scaled to |v|_{H^1} = amplitude |u*|_{H^1};
/// every component is then renormalized to N_j. `seed` drives the noise kind.
FieldState perturb(const StationaryState& reference, PerturbationKind kind, double amplitude,
                   std::uint64_t seed = 0);

/// Fraction of the total charge in the outer `fraction` of the radial domain.
double outer_mass_fraction(const FieldState& state, double fraction = 0.1);

/// Charge-weighted mean radius <r> of the density.
double mean_radius(const FieldState& state);

}  // namespace ellstar
