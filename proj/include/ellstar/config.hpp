#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ellstar/functional.hpp"
#include "ellstar/groundstate.hpp"
#include "ellstar/potential.hpp"

namespace ellstar {

struct GridConfig {
  std::optional<double> r_max;  // unset: sized automatically
  std::size_t n_points = 32768;
};

struct EvolutionConfig {
  std::optional<double> dt;  // unset: dt_factor / |omega|
  double dt_factor = 5e-3;
  std::optional<double> t_final;  // unset: periods * 2 pi / |omega|
  double periods = 10.0;
  int output_every = 10;
  std::string perturbation = "none";  // none | radial_bump | noise
  double amplitude = 0.01;
  std::uint64_t seed = 0;
  std::size_t n_points = 4096;
  double domain_factor = 2.0;  // r_max multiplier over the ground-state size
  bool boundary_guard = true;
};

struct ShootConfig {
  int n_nodes = 0;
  std::optional<double> central_value;  // unset: reach the component's N
};

struct SweepConfig {
  int ell = 0;
  std::vector<double> M{0.0, 0.5, 1.0};
  std::vector<double> N{0.5, 1.0, 2.0};
  int workers = 1;  // 0: one per hardware thread
};

struct ToleranceConfig {
  double pointwise = 1e-6;   // identities on one state
  double multi = 1e-5;       // summed omega-energy relation for several components
  double comparison = 1e-3;  // identities comparing two solves
  double limit = 0.01;       // hydrogenic limit
};

struct ModelConfig {
  std::vector<ComponentSpec> components{{0, 1.0}};
  ExternalPotential potential;
  GridConfig grid;
  SolverParams solver;
  EvolutionConfig evolution;
  ShootConfig shoot;
  SweepConfig sweep;
  ToleranceConfig tolerance;
  std::size_t verify_points = 32768;
  std::string output_directory = "out";

  void validate() const;
};

/// Parses flat "section.key = value" lines; '#' starts a comment. Errors
/// carry "<source>:<line>" and the offending key.
ModelConfig parse_config(std::istream& in, const std::string& source = "<config>");
ModelConfig load_config(const std::string& path);

/// "0:0.5, 1:0.5" -> components (ell:N pairs).
std::vector<ComponentSpec> parse_components(const std::string& text);

}  // namespace ellstar
