#include "ellstar/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "ellstar/errors.hpp"
#include "ellstar/shooting.hpp"

namespace ellstar {

namespace {

constexpr double kEnergySlack = 1e-12;
constexpr double kStepGrowth = 1.5;
constexpr double kStepCap = 0.9;  // fraction of 1/|omega| kept for I + dtau H > 0
constexpr std::size_t kCoarsePoints = 2048;

std::vector<double> self_potential(const FieldState& state, bool self_gravity) {
  if (!self_gravity) return std::vector<double>(state.grid().size(), 0.0);
  const auto grav = solve_poisson(density(state));
  const auto U = grav.U.values();
  return {U.begin(), U.end()};
}

EnergyBreakdown energy_of(const FieldState& state, const ExternalPotential& pot,
                          bool self_gravity) {
  EnergyBreakdown e;
  e.T = kinetic(state);
  e.L = external_energy(state, pot);
  e.D = self_gravity ? self_energy(state) : 0.0;
  e.E = e.T - e.L - e.D;
  return e;
}

void normalize(FieldState& state, std::span<const ComponentSpec> specs) {
  const auto N = charges(state);
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (!(N[j] > 0.0)) throw DomainError("cannot normalize a zero component");
    const double s = std::sqrt(specs[j].target_N / N[j]);
    for (auto& v : state[j].f.values()) v *= s;
  }
}

bool all_finite(const FieldState& state) {
  for (const auto& c : state) {
    for (const auto& v : c.f.values()) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  }
  return true;
}

struct Eigen {
  std::vector<double> omegas;
  double residual = 0.0;
};

Eigen rayleigh(const FieldState& state, const ExternalPotential& pot,
               std::span<const double> U) {
  Eigen out;
  for (std::size_t j = 0; j < state.size(); ++j) {
    const auto H = hamiltonian(state.grid(), state[j].spec.ell, pot, U);
    const auto g = state.reduced(j);
    std::vector<cplx> hg(g.size());
    H.apply<cplx>(g, hg);
    double gg = 0.0;
    cplx ghg{};
    for (std::size_t i = 0; i < g.size(); ++i) {
      gg += std::norm(g[i]);
      ghg += std::conj(g[i]) * hg[i];
    }
    if (!(gg > 0.0)) {
      throw DomainError("component " + std::to_string(j + 1) + " is identically zero");
    }
    const double w = ghg.real() / gg;
    double rr = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rr += std::norm(hg[i] - w * g[i]);
    out.omegas.push_back(w);
    out.residual += std::sqrt(rr / gg) / std::max(std::abs(w), 1e-300);
  }
  return out;
}

double most_bound(std::span<const double> omegas) {
  return *std::min_element(omegas.begin(), omegas.end());
}

}  // namespace

void SolverParams::validate() const {
  if (dtau < 0.0) throw ConfigError("solver.dtau must be >= 0");
  if (max_iterations <= 0) throw ConfigError("solver.max_iterations must be positive");
  if (!(energy_tolerance > 0.0)) throw ConfigError("solver.energy_tolerance must be positive");
  if (!(residual_tolerance > 0.0)) {
    throw ConfigError("solver.residual_tolerance must be positive");
  }
  if (!(mixing > 0.0 && mixing <= 1.0)) throw ConfigError("solver.mixing must lie in (0, 1]");
}

std::vector<double> extract_omega(const FieldState& state, const ExternalPotential& pot,
                                  bool self_gravity) {
  return rayleigh(state, pot, self_potential(state, self_gravity)).omegas;
}

double residual(const FieldState& state, const ExternalPotential& pot, bool self_gravity) {
  return rayleigh(state, pot, self_potential(state, self_gravity)).residual;
}

FieldState initial_guess(std::span<const ComponentSpec> components, const RadialGrid& grid,
                         double width) {
  FieldState state = FieldState::zeros(grid, components);
  for (auto& c : state) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.node(i);
      c.f[i] = std::pow(r, c.spec.ell) * std::exp(-0.5 * r * r / (width * width));
    }
  }
  normalize(state, components);
  return state;
}

double boundary_tail(const FieldState& state) {
  const std::size_t n = state.grid().size();
  const std::size_t start = n - std::max<std::size_t>(n / 50, 1);
  double worst = 0.0;
  for (const auto& c : state) {
    double peak = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(c.f[i]);
      peak = std::max(peak, a);
      if (i >= start) tail = std::max(tail, a);
    }
    if (peak > 0.0) worst = std::max(worst, tail / peak);
  }
  return worst;
}

StationaryState minimize_from(const FieldState& initial, const ExternalPotential& pot,
                              const SolverParams& params) {
  params.validate();
  pot.validate();
  const auto specs = initial.specs();
  validate_components(specs);
  const bool sg = params.self_gravity;
  const RadialGrid& grid = initial.grid();

  FieldState current = initial;
  normalize(current, specs);
  std::vector<double> U_true = self_potential(current, sg);
  std::vector<double> U_used = U_true;
  EnergyBreakdown energy = energy_of(current, pot, sg);
  Eigen eig = rayleigh(current, pot, U_true);
  std::vector<double> history{energy.E};

  double dtau = params.dtau;
  if (dtau <= 0.0) {
    const double w = most_bound(eig.omegas);
    dtau = w < 0.0 ? 0.5 / std::abs(w) : 10.0 * grid.spacing() * grid.spacing();
  }
  const double dtau_floor = 1e-6 * grid.spacing() * grid.spacing();

  int iteration = 0;
  while (iteration < params.max_iterations) {
    ++iteration;

    std::vector<SymTridiagonal> H;
    bool positive = true;
    for (const auto& c : current) {
      H.push_back(hamiltonian(grid, c.spec.ell, pot, U_used));
      positive = positive && H.back().shifted_identity_is_positive(dtau);
    }
    if (!positive) {
      dtau *= 0.5;
      if (dtau < dtau_floor) break;
      continue;
    }

    FieldState trial = current;
    for (std::size_t j = 0; j < trial.size(); ++j) {
      auto g = current.reduced(j);
      solve_shifted(H[j], cplx{1.0}, cplx{dtau}, g);
      trial.set_reduced(j, g);
    }
    if (!all_finite(trial)) throw BlowupError("imaginary-time flow produced non-finite values");
    normalize(trial, specs);
    const EnergyBreakdown trial_energy = energy_of(trial, pot, sg);
    if (!std::isfinite(trial_energy.E)) throw BlowupError("energy became non-finite");

    if (trial_energy.E > energy.E + kEnergySlack) {
      dtau *= 0.5;
      if (dtau < dtau_floor) break;
      continue;
    }

    const double change = std::abs(trial_energy.E - energy.E);
    current = std::move(trial);
    energy = trial_energy;
    history.push_back(energy.E);
    U_true = self_potential(current, sg);
    for (std::size_t i = 0; i < U_used.size(); ++i) {
      U_used[i] = (1.0 - params.mixing) * U_used[i] + params.mixing * U_true[i];
    }
    eig = rayleigh(current, pot, U_true);

    if (eig.residual < params.residual_tolerance &&
        change <= params.energy_tolerance * std::abs(energy.E)) {
      break;
    }
    const double w = most_bound(eig.omegas);
    dtau *= kStepGrowth;
    if (w < 0.0) dtau = std::min(dtau, kStepCap / std::abs(w));
  }

  if (!(eig.residual < params.residual_tolerance)) {
    std::ostringstream msg;
    msg << "minimizer did not converge after " << iteration
        << " iterations (residual " << eig.residual << ")";
    throw NonConvergenceError(msg.str(), eig.residual);
  }

  StationaryState out{current, pot, eig.omegas, energy, eig.residual, iteration, {},
                      std::move(history)};
  for (std::size_t j = 0; j < out.omegas.size(); ++j) {
    if (!(out.omegas[j] < 0.0)) {
      throw NumericalError("converged state has omega_" + std::to_string(j + 1) +
                           " >= 0; not a bound state");
    }
  }
  for (std::size_t j = 0; j < current.size(); ++j) {
    std::vector<double> re;
    for (const auto& v : current[j].f.values()) re.push_back(v.real());
    const int nodes = count_nodes(re);
    if (nodes != 0) {
      out.warnings.push_back("component " + std::to_string(j + 1) + " has " +
                             std::to_string(nodes) + " interior sign changes");
    }
  }
  const double tail = boundary_tail(current);
  if (tail > 1e-10) {
    std::ostringstream msg;
    msg << "profile at r_max is " << tail << " of its peak; increase grid.r_max";
    out.warnings.push_back(msg.str());
  }
  return out;
}

StationaryState minimize(std::span<const ComponentSpec> components, const ExternalPotential& pot,
                         const RadialGrid& grid, const SolverParams& params) {
  validate_components(components);
  auto out = minimize_from(initial_guess(components, grid, grid.r_max() / 15.0), pot, params);
  if (params.seed_check) {
    SolverParams again = params;
    again.seed_check = false;
    const auto other =
        minimize_from(initial_guess(components, grid, grid.r_max() / 6.0), pot, again);
    const double diff = std::abs(other.energy.E - out.energy.E) / std::abs(out.energy.E);
    if (diff > 1e-6) {
      std::ostringstream msg;
      msg << "initial-guess sensitivity: energies differ by " << diff << " (relative)";
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

double auto_radius(std::span<const ComponentSpec> components, const ExternalPotential& pot,
                   bool self_gravity, double decay_lengths) {
  validate_components(components);
  pot.validate();
  double total_N = 0.0;
  for (const auto& c : components) total_N += c.target_N;

  // Crude frequency estimate: hydrogenic for the external mass, the N^2 law
  // of the pure self-gravitating star otherwise.
  double weakest = std::numeric_limits<double>::infinity();
  for (const auto& c : components) {
    const double l1 = c.ell + 1.0;
    double w = pot.mass * pot.mass / (4.0 * l1 * l1);
    if (self_gravity) w = std::max(w, 5e-4 * total_N * total_N / (l1 * l1));
    weakest = std::min(weakest, w);
  }
  if (!(weakest > 0.0)) throw DomainError("no binding: neither external mass nor self-gravity");
  double r_max = decay_lengths / std::sqrt(weakest);

  SolverParams coarse;
  coarse.self_gravity = self_gravity;
  coarse.residual_tolerance = 1e-6;
  coarse.energy_tolerance = 1e-9;
  coarse.max_iterations = 2000;
  for (int pass = 0; pass < 3; ++pass) {
    const RadialGrid grid(r_max, kCoarsePoints);
    std::optional<StationaryState> found;
    try {
      found = minimize(components, pot, grid, coarse);
    } catch (const NumericalError&) {
      break;
    }
    const StationaryState& s = *found;
    double peak_r = 0.0;
    for (const auto& c : s.state) {
      double best = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = std::abs(c.f[i]) * grid.node(i);
        if (a > best) {
          best = a;
          peak_r = std::max(peak_r, grid.node(i));
        }
      }
    }
    double least = std::numeric_limits<double>::infinity();
    for (double w : s.omegas) least = std::min(least, std::abs(w));
    const double next = peak_r + decay_lengths / std::sqrt(least);
    const bool settled = std::abs(next - r_max) < 0.05 * r_max;
    r_max = next;
    if (settled) break;
  }
  return r_max;
}

}  // namespace ellstar
