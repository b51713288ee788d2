#include "ellstar/output.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "ellstar/errors.hpp"

namespace ellstar {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const CheckReport& r) {
  return {{"name", r.name},
          {"lhs", number_or_null(r.lhs)},
          {"rhs", number_or_null(r.rhs)},
          {"residual", number_or_null(r.residual)},
          {"tolerance", number_or_null(r.tolerance)},
          {"pass", r.pass},
          {"detail", r.detail}};
}

nlohmann::json to_json(const EnergyBreakdown& e) {
  return {{"T", e.T}, {"L", e.L}, {"D", e.D}, {"E", e.E}};
}

nlohmann::json summary_json(const StationaryState& s) {
  nlohmann::json comps = nlohmann::json::array();
  const auto N = s.charges();
  for (std::size_t j = 0; j < s.state.size(); ++j) {
    comps.push_back({{"ell", s.state[j].spec.ell}, {"N", N[j]}, {"omega", s.omegas[j]}});
  }
  return {{"components", comps},
          {"potential",
           {{"kind", std::string(to_string(s.potential.kind))},
            {"M", s.potential.mass},
            {"b", s.potential.softening}}},
          {"grid", {{"r_max", s.state.grid().r_max()}, {"n_points", s.state.grid().size()}}},
          {"energy", to_json(s.energy)},
          {"residual", s.residual},
          {"iterations", s.iterations},
          {"warnings", s.warnings}};
}

nlohmann::json summary_json(const ShootResult& r, double fd_residual) {
  return {{"ell", r.ell},
          {"nodes", r.nodes},
          {"omega", r.omega},
          {"N", r.N_achieved},
          {"central_value", r.central_value},
          {"energy", to_json(r.energy)},
          {"potential",
           {{"kind", std::string(to_string(r.potential.kind))},
            {"M", r.potential.mass},
            {"b", r.potential.softening}}},
          {"grid", {{"r_max", r.profile.grid().r_max()}, {"n_points", r.profile.size()}}},
          {"self_gravity", r.self_gravity},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"residual", fd_residual}};
}

void write_profile_csv(const std::filesystem::path& path, const FieldState& state,
                       const ExternalPotential& pot) {
  auto out = open_for_write(path);
  const auto n = density(state);
  const auto U = solve_poisson(n).U;
  out << "r";
  for (std::size_t j = 1; j <= state.size(); ++j) out << ",f_" << j << "_re,f_" << j << "_im";
  out << ",n,U,V\n";
  for (std::size_t i = 0; i < state.grid().size(); ++i) {
    const double r = state.grid().node(i);
    out << r;
    for (const auto& c : state) out << ',' << c.f[i].real() << ',' << c.f[i].imag();
    out << ',' << n[i] << ',' << U[i] << ',' << pot(r) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const EvolutionTrace& trace) {
  auto out = open_for_write(path);
  const std::size_t r = trace.norms.empty() ? 0 : trace.norms.front().size();
  out << "t,E";
  for (std::size_t j = 1; j <= r; ++j) out << ",N_" << j;
  out << ",dist_orbit,r_mean\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    out << trace.times[k] << ',' << trace.energy[k];
    for (double N : trace.norms[k]) out << ',' << N;
    out << ',';
    if (k < trace.orbit_distance.size()) out << trace.orbit_distance[k];
    out << ',' << trace.mean_radius[k] << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  auto out = open_for_write(path);
  out << "M,N,E,T,L,D,omega,residual,nodes\n";
  for (const auto& row : rows) {
    out << row.M << ',' << row.N << ',';
    if (row.error.empty()) {
      out << row.energy.E << ',' << row.energy.T << ',' << row.energy.L << ',' << row.energy.D
          << ',' << row.omega << ',' << row.residual << ',' << row.nodes << '\n';
    } else {
      out << "nan,nan,nan,nan,nan,nan,-1\n";
    }
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
}

}  // namespace ellstar
