#include "ellstar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ellstar/errors.hpp"
#include "ellstar/shooting.hpp"

namespace ellstar {

namespace {

constexpr double kTiny = 1e-300;

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), kTiny); }

std::string fmt(const char* label, double v) {
  std::ostringstream s;
  s << label << "=" << v;
  return s.str();
}

StationaryState solve_single(const Solver& solve, int ell, double M, double N) {
  const ComponentSpec spec{ell, N};
  const auto pot = M > 0.0 ? ExternalPotential::point_mass(M) : ExternalPotential::none();
  return solve(std::span<const ComponentSpec>(&spec, 1), pot);
}

void require_homogeneous(const ExternalPotential& pot, const char* what) {
  if (pot.kind == PotentialKind::plummer) {
    throw InapplicableCheckError(std::string(what) +
                                 " requires V homogeneous of degree -1 (none or point_mass)");
  }
}

}  // namespace

CheckReport make_report(std::string name, double lhs, double rhs, double residual,
                        double tolerance, std::string detail) {
  return {std::move(name), lhs, rhs, residual, tolerance, residual <= tolerance,
          std::move(detail)};
}

Solver make_solver(std::size_t n_points, SolverParams params) {
  return [n_points, params](std::span<const ComponentSpec> specs, const ExternalPotential& pot) {
    const double r_max = auto_radius(specs, pot, params.self_gravity);
    return minimize(specs, pot, RadialGrid(r_max, n_points), params);
  };
}

CheckReport virial_check(const StationaryState& s, double tolerance) {
  require_homogeneous(s.potential, "virial check");
  const auto& e = s.energy;
  return make_report("virial 2T - L - D = 0", 2.0 * e.T, e.L + e.D,
                     std::abs(2.0 * e.T - e.L - e.D) / std::max(std::abs(e.E), kTiny),
                     tolerance);
}

CheckReport virial_energy_check(const StationaryState& s, double tolerance) {
  require_homogeneous(s.potential, "E = -T check");
  const auto& e = s.energy;
  return make_report("E = -T", e.E, -e.T, relative(e.E, -e.T), tolerance);
}

CheckReport omega_energy_check(const StationaryState& s, double tolerance) {
  const auto N = s.charges();
  double lhs = 0.0;
  for (std::size_t j = 0; j < N.size(); ++j) lhs += 0.5 * N[j] * s.omegas[j];
  const double rhs = s.energy.E - s.energy.D;
  return make_report("omega-energy (1/2) sum N_j omega_j = E - D", lhs, rhs,
                     std::abs(lhs - rhs) / std::max(std::abs(s.energy.E), kTiny), tolerance);
}

CheckReport nodeless_check(const StationaryState& s) {
  int worst = 0;
  for (const auto& c : s.state) {
    std::vector<double> re;
    re.reserve(c.f.size());
    for (const auto& v : c.f.values()) re.push_back(v.real());
    worst = std::max(worst, count_nodes(re));
  }
  return make_report("ground state is nodeless", worst, 0.0, worst, 0.0);
}

std::vector<CheckReport> scaling_check(int ell, double M, double base_N,
                                       std::span<const double> lambdas, const Solver& solve,
                                       const Solver& reference, double tolerance) {
  if (!(base_N > 0.0)) throw DomainError("scaling check: base N must be positive");
  std::vector<CheckReport> out;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw DomainError("scaling check: lambda must be positive");
    const double N = lambda * base_N;
    const auto big = solve_single(solve, ell, M, N);
    const auto unit = solve_single(reference, ell, M / N, 1.0);
    const std::string tag = "l=" + std::to_string(ell) + " " + fmt("M", M) + " " + fmt("N", N);
    const double e_rhs = N * N * N * unit.energy.E;
    out.push_back(make_report("scaling E(M,N) = N^3 E(M/N,1) " + tag, big.energy.E, e_rhs,
                              relative(big.energy.E, e_rhs), tolerance));
    const double w_rhs = N * N * unit.omegas[0];
    out.push_back(make_report("scaling omega(M,N) = N^2 omega(M/N,1) " + tag, big.omegas[0],
                              w_rhs, relative(big.omegas[0], w_rhs), tolerance));
    if (M == 0.0) {
      out.push_back(make_report("omega(0,1) = 6 E(0,1) l=" + std::to_string(ell),
                                unit.omegas[0], 6.0 * unit.energy.E,
                                relative(unit.omegas[0], 6.0 * unit.energy.E), tolerance));
    }
  }
  return out;
}

std::vector<CheckReport> small_N_limit_check(int ell, double M, std::span<const double> N_seq,
                                             const Solver& solve, double tolerance) {
  if (!(M > 0.0)) throw DomainError("small-N limit requires M > 0");
  if (N_seq.empty()) throw DomainError("small-N limit needs at least one N");
  for (std::size_t k = 1; k < N_seq.size(); ++k) {
    if (!(N_seq[k] < N_seq[k - 1])) throw DomainError("small-N sequence must be decreasing");
  }
  const double l1 = ell + 1.0;
  const double target = -M * M / (4.0 * l1 * l1);
  std::vector<CheckReport> out;
  std::vector<double> gaps;
  for (std::size_t k = 0; k < N_seq.size(); ++k) {
    const auto s = solve_single(solve, ell, M, N_seq[k]);
    const double gap = relative(s.omegas[0], target);
    gaps.push_back(gap);
    const bool last = k + 1 == N_seq.size();
    out.push_back(make_report("hydrogenic limit l=" + std::to_string(ell) + " " +
                                  fmt("M", M) + " " + fmt("N", N_seq[k]),
                              s.omegas[0], target, gap, last ? tolerance : 1.0));
  }
  int increases = 0;
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    if (!(gaps[k] < gaps[k - 1])) ++increases;
  }
  out.push_back(make_report("hydrogenic gap shrinks monotonically l=" + std::to_string(ell),
                            increases, 0.0, increases, 0.0));
  return out;
}

CheckReport large_N_trend_check(int ell, double M, std::span<const double> N_seq,
                                const Solver& solve) {
  std::vector<double> q;
  std::ostringstream detail;
  for (double N : N_seq) {
    const double w = solve_single(solve, ell, M, N).omegas[0];
    const double w0 = solve_single(solve, ell, 0.0, N).omegas[0];
    q.push_back(std::abs(w - w0) / (N * N));
    detail << "N=" << N << ": " << q.back() << "; ";
  }
  int increases = 0;
  for (std::size_t k = 1; k < q.size(); ++k) {
    if (!(q[k] < q[k - 1])) ++increases;
  }
  return make_report("(omega(M,N) - omega(0,N)) / N^2 decreasing l=" + std::to_string(ell),
                     q.empty() ? 0.0 : q.back(), 0.0, increases, 0.0, detail.str());
}

MonotonicitySweep monotonicity_sweep(int ell, std::span<const double> M_grid,
                                     std::span<const double> N_grid, const Solver& solve,
                                     double slack) {
  for (std::size_t k = 1; k < M_grid.size(); ++k) {
    if (!(M_grid[k] > M_grid[k - 1])) throw DomainError("M grid must be sorted ascending");
  }
  for (std::size_t k = 1; k < N_grid.size(); ++k) {
    if (!(N_grid[k] > N_grid[k - 1])) throw DomainError("N grid must be sorted ascending");
  }
  std::vector<std::vector<double>> E;
  for (double M : M_grid) {
    std::vector<double> row;
    for (double N : N_grid) row.push_back(solve_single(solve, ell, M, N).energy.E);
    E.push_back(std::move(row));
  }
  return check_monotonicity(ell, {M_grid.begin(), M_grid.end()}, {N_grid.begin(), N_grid.end()},
                            std::move(E), slack);
}

MonotonicitySweep check_monotonicity(int ell, std::vector<double> M, std::vector<double> N,
                                     std::vector<std::vector<double>> E, double slack) {
  MonotonicitySweep out{std::move(M), std::move(N), std::move(E), {}, {}};
  int violations = 0, positive = 0;
  std::string first;
  auto flag = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    ++violations;
    if (first.empty()) {
      std::ostringstream s;
      s << "E(" << out.M[c] << "," << out.N[d] << ") > E(" << out.M[a] << "," << out.N[b] << ")";
      first = s.str();
    }
  };
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.M.size(); ++i) {
    for (std::size_t k = 0; k < out.N.size(); ++k) {
      const double e = out.E[i][k];
      worst = std::max(worst, e);
      if (!(e < 0.0)) ++positive;
      if (i + 1 < out.M.size() && out.E[i + 1][k] > e + slack * std::abs(e)) flag(i, k, i + 1, k);
      if (k + 1 < out.N.size() && !(out.E[i][k + 1] < e + slack * std::abs(e))) {
        flag(i, k, i, k + 1);
      }
    }
  }
  out.ordering = make_report("E decreasing in M and N l=" + std::to_string(ell), violations, 0.0,
                             violations, 0.0, first);
  out.negativity = make_report("E < 0 on the sweep grid l=" + std::to_string(ell), worst, 0.0,
                               positive, 0.0);
  return out;
}

}  // namespace ellstar
