#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ellstar/diagnostics.hpp"
#include "ellstar/evolve.hpp"
#include "ellstar/groundstate.hpp"
#include "ellstar/shooting.hpp"

namespace ellstar {

/// One row of the (M, N) sweep table.
struct SweepRow {
  double M = 0.0;
  double N = 0.0;
  EnergyBreakdown energy;
  double omega = 0.0;
  double residual = 0.0;
  int nodes = 0;
  std::string error;  // non-empty if the solve failed
};

nlohmann::json to_json(const CheckReport& report);
nlohmann::json to_json(const EnergyBreakdown& energy);
nlohmann::json summary_json(const StationaryState& state);
nlohmann::json summary_json(const ShootResult& result, double fd_residual);

/// Columns: r, f_<j>_re, f_<j>_im per component, n, U, V.
void write_profile_csv(const std::filesystem::path& path, const FieldState& state,
                       const ExternalPotential& pot);
/// Columns: t, E, N_1..N_r, dist_orbit, r_mean.
void write_trace_csv(const std::filesystem::path& path, const EvolutionTrace& trace);
/// Columns: M, N, E, T, L, D, omega, residual, nodes.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace ellstar
