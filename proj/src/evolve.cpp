#include "ellstar/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ellstar/errors.hpp"

namespace ellstar {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> potential_of(std::span<const std::vector<cplx>> g, const FieldState& like,
                                 bool self_gravity) {
  const auto& grid = like.grid();
  std::vector<double> n(grid.size(), 0.0);
  if (!self_gravity) return n;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double pref = (2.0 * like[j].spec.ell + 1.0) / (4.0 * kPi);
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double r = grid.node(i);
      n[i] += pref * std::norm(g[j][i]) / (r * r);
    }
  }
  const auto grav = solve_poisson(n, grid);
  const auto U = grav.U.values();
  return {U.begin(), U.end()};
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

FieldState step(const FieldState& state, const ExternalPotential& pot, double dt,
                const StepOptions& options, StepInfo* info) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
  const auto& grid = state.grid();
  const std::size_t r = state.size();

  std::vector<std::vector<cplx>> g_old(r), g_new(r), half(r);
  std::vector<SymTridiagonal> H0;
  for (std::size_t j = 0; j < r; ++j) {
    g_old[j] = state.reduced(j);
    H0.push_back(hamiltonian(grid, state[j].spec.ell, pot, {}));
  }

  std::vector<double> U_mid = potential_of(g_old, state, options.self_gravity);
  const cplx beta{0.0, 0.5 * dt};
  StepInfo local;
  local.midpoint_converged = false;
  for (int it = 1; it <= options.max_midpoint_iterations; ++it) {
    local.midpoint_iterations = it;
    for (std::size_t j = 0; j < r; ++j) {
      SymTridiagonal H = H0[j];
      for (std::size_t i = 0; i < H.size(); ++i) H.diag[i] += U_mid[i];
      std::vector<cplx> Hg(grid.size());
      H.apply<cplx>(g_old[j], Hg);
      g_new[j].resize(grid.size());
      for (std::size_t i = 0; i < Hg.size(); ++i) g_new[j][i] = g_old[j][i] - beta * Hg[i];
      solve_shifted(H, cplx{1.0}, beta, g_new[j]);
      half[j].resize(grid.size());
      for (std::size_t i = 0; i < Hg.size(); ++i) half[j][i] = 0.5 * (g_old[j][i] + g_new[j][i]);
    }
    if (!options.self_gravity) {
      local.midpoint_converged = true;
      break;
    }
    const auto U_next = potential_of(half, state, true);
    double change = 0.0;
    for (std::size_t i = 0; i < U_next.size(); ++i) {
      change = std::max(change, std::abs(U_next[i] - U_mid[i]));
    }
    const double scale = sup_abs(U_next);
    U_mid = U_next;
    if (change <= options.midpoint_tolerance * scale) {
      local.midpoint_converged = true;
      break;
    }
  }

  FieldState out = state;
  for (std::size_t j = 0; j < r; ++j) {
    for (const auto& v : g_new[j]) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw BlowupError("time step produced non-finite values");
      }
    }
    out.set_reduced(j, g_new[j]);
  }
  if (info) *info = local;
  return out;
}

double outer_mass_fraction(const FieldState& state, double fraction) {
  const auto n = density(state);
  const auto w = state.grid().weights();
  const double edge = (1.0 - fraction) * state.grid().r_max();
  double total = 0.0, outer = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total += n[i] * w[i];
    if (state.grid().node(i) >= edge) outer += n[i] * w[i];
  }
  return total > 0.0 ? outer / total : 0.0;
}

double mean_radius(const FieldState& state) {
  const auto n = density(state);
  const auto w = state.grid().weights();
  double total = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total += n[i] * w[i];
    moment += n[i] * w[i] * state.grid().node(i);
  }
  return total > 0.0 ? moment / total : 0.0;
}

EvolutionTrace evolve(const FieldState& initial, const ExternalPotential& pot, double t_final,
                      double dt, const StationaryState* reference,
                      const EvolveOptions& options) {
  if (!(t_final > 0.0)) throw DomainError("t_final must be positive");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (options.output_every <= 0) throw ConfigError("output_every must be positive");
  if (reference) require_same_structure(initial, reference->state);

  const long n_steps = std::max(1L, static_cast<long>(std::ceil(t_final / dt - 1e-9)));
  const double h = t_final / static_cast<double>(n_steps);
  const bool sg = options.step.self_gravity;

  EvolutionTrace trace{{}, {}, {}, {}, {}, 0, 0, false, {}, initial};
  auto record = [&](double t, const FieldState& s) {
    trace.times.push_back(t);
    const double D = sg ? self_energy(s) : 0.0;
    trace.energy.push_back(kinetic(s) - external_energy(s, pot) - D);
    trace.norms.push_back(charges(s));
    if (reference) trace.orbit_distance.push_back(h1_distance_mod_phase(s, reference->state));
    trace.mean_radius.push_back(mean_radius(s));
  };

  FieldState state = initial;
  record(0.0, state);
  for (long k = 1; k <= n_steps; ++k) {
    StepInfo info;
    state = step(state, pot, h, options.step, &info);
    trace.steps = static_cast<int>(k);
    if (!info.midpoint_converged) ++trace.unconverged_midpoints;
    if (k % options.output_every == 0 || k == n_steps) {
      record(static_cast<double>(k) * h, state);
      if (options.boundary_guard) {
        const double outer = outer_mass_fraction(state, 0.1);
        if (outer > options.boundary_fraction) {
          std::ostringstream msg;
          msg << "boundary contamination at t = " << static_cast<double>(k) * h
              << ": outer 10% of the domain holds " << outer
              << " of the charge; trace truncated";
          trace.warnings.push_back(msg.str());
          trace.truncated = true;
          break;
        }
      }
    }
  }
  if (trace.unconverged_midpoints > 0) {
    trace.warnings.push_back("midpoint iteration hit its cap in " +
                             std::to_string(trace.unconverged_midpoints) + " steps");
  }
  trace.final_state = std::move(state);
  return trace;
}

PerturbationKind parse_perturbation_kind(const std::string& name) {
  if (name == "radial_bump") return PerturbationKind::radial_bump;
  if (name == "noise" || name == "norm_preserving_noise") return PerturbationKind::noise;
  throw ConfigError("unknown perturbation kind '" + name + "'");
}

std::string to_string(PerturbationKind kind) {
  return kind == PerturbationKind::radial_bump ? "radial_bump" : "noise";
}

FieldState perturb(const StationaryState& reference, PerturbationKind kind, double amplitude,
                   std::uint64_t seed) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("perturbation amplitude must be finite and >= 0");
  }
  const FieldState& base = reference.state;
  if (amplitude == 0.0) return base;
  const auto& grid = base.grid();
  const auto w = grid.weights();
  const double s = mean_radius(base);
  if (!(s > 0.0)) throw DomainError("cannot perturb a zero state");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  FieldState v = FieldState::zeros(grid, base.specs());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const int ell = v[j].spec.ell;
    std::vector<cplx> coeff;
    if (kind == PerturbationKind::noise) {
      for (int k = 0; k < 5; ++k) coeff.emplace_back(normal(rng), normal(rng));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.node(i) / s;
      const double envelope = std::pow(x, ell) * std::exp(-0.5 * x * x);
      if (kind == PerturbationKind::radial_bump) {
        v[j].f[i] = x * x * envelope;
      } else {
        cplx p{};
        for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) p = p * x + *it;
        v[j].f[i] = p * envelope;
      }
    }
    // remove the component along u*_j
    cplx uv{};
    double uu = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      uv += std::conj(base[j].f[i]) * v[j].f[i] * w[i];
      uu += std::norm(base[j].f[i]) * w[i];
    }
    for (std::size_t i = 0; i < grid.size(); ++i) v[j].f[i] -= (uv / uu) * base[j].f[i];
  }

  const double vn = h1_norm(v);
  if (!(vn > 0.0)) throw DomainError("perturbation direction vanished after projection");
  const double scale = amplitude * h1_norm(base) / vn;
  FieldState out = base;
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) out[j].f[i] += scale * v[j].f[i];
  }
  const auto N = charges(out);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double c = std::sqrt(out[j].spec.target_N / N[j]);
    for (auto& x : out[j].f.values()) {
      x *= c;
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
        throw DomainError("perturbed profile is not finite");
      }
    }
  }
  return out;
}

}  // namespace ellstar
