#include "ellstar/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "ellstar/config.hpp"
#include "ellstar/diagnostics.hpp"
#include "ellstar/errors.hpp"
#include "ellstar/evolve.hpp"
#include "ellstar/groundstate.hpp"
#include "ellstar/output.hpp"
#include "ellstar/shooting.hpp"

namespace ellstar {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Context {
  ModelConfig cfg;
  fs::path out_dir;
  std::ostream& out;
  int resolution_factor = 2;
};

double ground_radius(const ModelConfig& cfg) {
  if (cfg.grid.r_max) return *cfg.grid.r_max;
  return auto_radius(cfg.components, cfg.potential, cfg.solver.self_gravity);
}

double most_bound(const std::vector<double>& omegas) {
  return *std::min_element(omegas.begin(), omegas.end());
}

void print_check(std::ostream& out, const CheckReport& r) {
  out << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  residual=" << r.residual
      << " tol=" << r.tolerance;
  if (!r.detail.empty()) out << "  (" << r.detail << ")";
  out << '\n';
}

std::vector<CheckReport> state_checks(const StationaryState& s, const ToleranceConfig& tol) {
  std::vector<CheckReport> checks;
  checks.push_back(
      omega_energy_check(s, s.state.size() > 1 ? tol.multi : tol.pointwise));
  if (s.potential.kind != PotentialKind::plummer) {
    checks.push_back(virial_check(s, tol.pointwise));
    checks.push_back(virial_energy_check(s, tol.pointwise));
  }
  checks.push_back(nodeless_check(s));
  return checks;
}

json checks_json(const std::vector<CheckReport>& checks) {
  json arr = json::array();
  for (const auto& c : checks) arr.push_back(to_json(c));
  return arr;
}

int cmd_solve(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const RadialGrid grid(ground_radius(cfg), cfg.grid.n_points);
  const auto s = minimize(cfg.components, cfg.potential, grid, cfg.solver);
  const auto checks = state_checks(s, cfg.tolerance);

  json doc = summary_json(s);
  doc["checks"] = checks_json(checks);
  write_profile_csv(ctx.out_dir / "profile.csv", s.state, s.potential);
  write_json(ctx.out_dir / "summary.json", doc);

  ctx.out << "E = " << s.energy.E << "  T = " << s.energy.T << "  L = " << s.energy.L
          << "  D = " << s.energy.D << '\n';
  for (std::size_t j = 0; j < s.omegas.size(); ++j) {
    ctx.out << "omega_" << j + 1 << " = " << s.omegas[j] << "  (ell = " << s.state[j].spec.ell
            << ")\n";
  }
  ctx.out << "residual = " << s.residual << " after " << s.iterations << " iterations\n";
  for (const auto& w : s.warnings) ctx.out << "warning: " << w << '\n';
  for (const auto& c : checks) print_check(ctx.out, c);
  return kExitOk;
}

int cmd_shoot(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.components.size() != 1) {
    throw ConfigError("shoot handles exactly one component");
  }
  const int ell = cfg.components[0].ell;
  const double target_N = cfg.components[0].target_N;
  const int n = cfg.shoot.n_nodes;
  const bool sg = cfg.solver.self_gravity;
  const double spread = (n + 1.0) * (n + 1.0);

  auto grid_for = [&](double base) {
    return RadialGrid(cfg.grid.r_max ? *cfg.grid.r_max : base, cfg.grid.n_points);
  };
  std::optional<ShootResult> res;
  if (cfg.shoot.central_value) {
    const double c = *cfg.shoot.central_value;
    if (cfg.grid.r_max) {
      res = shoot_stationary(ell, n, cfg.potential, sg, c, grid_for(0.0));
    } else {
      res = shoot_auto_grid(ell, n, cfg.potential, sg, c, cfg.grid.n_points);
    }
  } else if (sg) {
    const auto grid = grid_for(spread * auto_radius(cfg.components, cfg.potential, true));
    res = shoot_to_charge(ell, n, cfg.potential, target_N, grid);
  } else {
    const auto grid = grid_for(spread * auto_radius(cfg.components, cfg.potential, false));
    ShootResult r = shoot_stationary(ell, n, cfg.potential, false, 1.0, grid);
    const double s = std::sqrt(target_N / r.N_achieved);
    for (auto& v : r.profile.values()) v *= s;
    r.central_value *= s;
    r.N_achieved = target_N;
    r.energy = {s * s * r.energy.T, s * s * r.energy.L, 0.0, s * s * r.energy.E};
    res = std::move(r);
  }

  const double fd_residual = residual(res->to_state(), res->potential, sg);
  write_profile_csv(ctx.out_dir / "profile.csv", res->to_state(), res->potential);
  write_json(ctx.out_dir / "summary.json", summary_json(*res, fd_residual));
  ctx.out << "omega = " << res->omega << "  N = " << res->N_achieved << "  nodes = " << res->nodes
          << "  E = " << res->energy.E << '\n';
  if (res->nodes != n) {
    ctx.out << "warning: profile has " << res->nodes << " nodes, requested " << n << '\n';
  }
  return kExitOk;
}

int cmd_evolve(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& ev = cfg.evolution;
  const RadialGrid grid(ground_radius(cfg) * ev.domain_factor, ev.n_points);
  const auto s = minimize(cfg.components, cfg.potential, grid, cfg.solver);
  const double w = std::abs(most_bound(s.omegas));
  const double period = 2.0 * std::numbers::pi / w;
  const double dt = ev.dt ? *ev.dt : ev.dt_factor / w;
  const double t_final = ev.t_final ? *ev.t_final : ev.periods * period;

  const FieldState initial =
      ev.perturbation == "none"
          ? s.state
          : perturb(s, parse_perturbation_kind(ev.perturbation), ev.amplitude, ev.seed);
  EvolveOptions opts;
  opts.step.self_gravity = cfg.solver.self_gravity;
  opts.output_every = ev.output_every;
  opts.boundary_guard = ev.boundary_guard;
  const auto trace = evolve(initial, cfg.potential, t_final, dt, &s, opts);

  double energy_drift = 0.0, norm_drift = 0.0, dist_max = 0.0;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    energy_drift = std::max(energy_drift, std::abs(trace.energy[k] - trace.energy[0]) /
                                              std::abs(trace.energy[0]));
    for (std::size_t j = 0; j < trace.norms[k].size(); ++j) {
      norm_drift = std::max(norm_drift, std::abs(trace.norms[k][j] - trace.norms[0][j]) /
                                            trace.norms[0][j]);
    }
    dist_max = std::max(dist_max, trace.orbit_distance[k]);
  }
  json doc = {{"ground_state", summary_json(s)},
              {"period", period},
              {"dt", dt},
              {"t_final", t_final},
              {"steps", trace.steps},
              {"perturbation", ev.perturbation},
              {"amplitude", ev.amplitude},
              {"seed", ev.seed},
              {"max_relative_energy_drift", energy_drift},
              {"max_relative_norm_drift", norm_drift},
              {"dist_orbit_initial", trace.orbit_distance.front()},
              {"dist_orbit_max", dist_max},
              {"unconverged_midpoints", trace.unconverged_midpoints},
              {"truncated", trace.truncated},
              {"warnings", trace.warnings}};
  write_trace_csv(ctx.out_dir / "trace.csv", trace);
  write_json(ctx.out_dir / "summary.json", doc);
  ctx.out << "steps = " << trace.steps << "  energy drift = " << energy_drift
          << "  norm drift = " << norm_drift << "  dist_orbit: " << trace.orbit_distance.front()
          << " -> max " << dist_max << '\n';
  for (const auto& wmsg : trace.warnings) ctx.out << "warning: " << wmsg << '\n';
  return kExitOk;
}

int cmd_sweep(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& sw = cfg.sweep;
  std::vector<SweepRow> rows;
  for (double M : sw.M) {
    for (double N : sw.N) rows.push_back({M, N, {}, 0.0, 0.0, 0, {}});
  }
  auto potential_for = [&](double M) {
    if (M <= 0.0) return ExternalPotential::none();
    if (cfg.potential.kind == PotentialKind::plummer) {
      return ExternalPotential::plummer(M, cfg.potential.softening);
    }
    return ExternalPotential::point_mass(M);
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      auto& row = rows[k];
      try {
        const ComponentSpec spec{sw.ell, row.N};
        const std::span<const ComponentSpec> specs(&spec, 1);
        const auto pot = potential_for(row.M);
        const RadialGrid grid(auto_radius(specs, pot, cfg.solver.self_gravity),
                              cfg.grid.n_points);
        const auto s = minimize(specs, pot, grid, cfg.solver);
        row.energy = s.energy;
        row.omega = s.omegas[0];
        row.residual = s.residual;
        row.nodes = nodeless_check(s).pass ? 0 : static_cast<int>(nodeless_check(s).lhs);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  unsigned workers = sw.workers > 0 ? static_cast<unsigned>(sw.workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(rows.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  write_sweep_csv(ctx.out_dir / "sweep.csv", rows);
  bool failed = false;
  json failures = json::array();
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      failed = true;
      failures.push_back({{"M", row.M}, {"N", row.N}, {"error", row.error}});
      ctx.out << "solve failed at M = " << row.M << ", N = " << row.N << ": " << row.error << '\n';
    }
  }
  json doc = {{"ell", sw.ell}, {"failures", failures}};
  if (!failed) {
    std::vector<std::vector<double>> E(sw.M.size(), std::vector<double>(sw.N.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) E[k / sw.N.size()][k % sw.N.size()] = rows[k].energy.E;
    const bool sorted = std::is_sorted(sw.M.begin(), sw.M.end()) &&
                        std::is_sorted(sw.N.begin(), sw.N.end());
    if (sorted) {
      const auto mono = check_monotonicity(sw.ell, sw.M, sw.N, E);
      doc["checks"] = checks_json({mono.ordering, mono.negativity});
      print_check(ctx.out, mono.ordering);
      print_check(ctx.out, mono.negativity);
    }
  }
  write_json(ctx.out_dir / "sweep.json", doc);
  ctx.out << "wrote " << rows.size() << " rows to " << (ctx.out_dir / "sweep.csv").string() << '\n';
  return failed ? kExitNumerical : kExitOk;
}

std::vector<CheckReport> identity_suite(const ModelConfig& cfg, std::size_t n_points,
                                        std::vector<CheckReport>& advisory) {
  const auto& tol = cfg.tolerance;
  const Solver solve = make_solver(n_points, cfg.solver);
  std::vector<CheckReport> checks = state_checks(solve(cfg.components, cfg.potential), tol);

  const int ell = cfg.components.front().ell;
  const double lambdas[] = {1.0, 2.0};
  const Solver reference = make_solver(n_points + n_points / 2, cfg.solver);
  for (auto& c : scaling_check(ell, 0.0, 1.0, lambdas, solve, reference, tol.comparison)) {
    checks.push_back(std::move(c));
  }
  const double M_limit = (cfg.potential.kind == PotentialKind::point_mass && cfg.potential.mass > 0)
                             ? cfg.potential.mass
                             : 1.0;
  const double small_N[] = {1e-1, 1e-2, 1e-3};
  for (auto& c : small_N_limit_check(ell, M_limit, small_N, solve, tol.limit)) {
    checks.push_back(std::move(c));
  }
  auto mono = monotonicity_sweep(cfg.sweep.ell, cfg.sweep.M, cfg.sweep.N, solve);
  checks.push_back(mono.ordering);
  checks.push_back(mono.negativity);

  const double large_N[] = {1.0, 4.0, 16.0};
  advisory.push_back(large_N_trend_check(ell, M_limit, large_N, solve));
  return checks;
}

int cmd_verify(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (ctx.resolution_factor < 1) throw ConfigError("--resolution-factor must be >= 1");
  std::vector<std::size_t> resolutions{cfg.verify_points};
  if (ctx.resolution_factor > 1) {
    resolutions.push_back(cfg.verify_points * static_cast<std::size_t>(ctx.resolution_factor));
  }

  bool all_pass = true;
  json runs = json::array();
  json advisory_json = json::array();
  std::vector<double> virial_residuals;
  for (std::size_t n : resolutions) {
    ctx.out << "-- n_points = " << n << '\n';
    std::vector<CheckReport> advisory;
    const auto checks = identity_suite(cfg, n, advisory);
    for (const auto& c : checks) {
      print_check(ctx.out, c);
      all_pass = all_pass && c.pass;
      if (c.name.rfind("virial", 0) == 0) virial_residuals.push_back(c.residual);
    }
    for (const auto& c : advisory) {
      ctx.out << "note  " << c.name << "  (" << c.detail << ")\n";
      advisory_json.push_back(to_json(c));
    }
    runs.push_back({{"n_points", n}, {"checks", checks_json(checks)}});
  }
  if (virial_residuals.size() == 2) {
    const auto r = make_report("virial residual does not grow under refinement",
                               virial_residuals[1], virial_residuals[0],
                               virial_residuals[1] <= virial_residuals[0] ? 0.0 : 1.0, 0.0);
    advisory_json.push_back(to_json(r));
  }
  write_json(ctx.out_dir / "verify.json",
             {{"pass", all_pass}, {"resolutions", runs}, {"advisory", advisory_json}});
  ctx.out << (all_pass ? "verify: all checks passed\n" : "verify: FAILED\n");
  return all_pass ? kExitOk : kExitNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ellstar: ground states, excited states and dynamics of l-boson stars"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int resolution_factor = 2;
  app.add_option("--config", config_path, "configuration file (key = value lines)");
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for noise perturbations");
  app.add_subcommand("solve", "minimize the energy at fixed charges");
  app.add_subcommand("shoot", "shooting oracle for one ell and node count");
  app.add_subcommand("evolve", "time evolution of a (perturbed) ground state");
  app.add_subcommand("sweep", "ground states on an (M, N) grid");
  auto* verify = app.add_subcommand("verify", "identity suite at two resolutions");
  verify->add_option("--resolution-factor", resolution_factor, "refinement factor");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    ModelConfig cfg = config_path.empty() ? ModelConfig{} : load_config(config_path);
    cfg.validate();
    if (!out_dir.empty()) cfg.output_directory = out_dir;
    if (seed_opt->count() > 0) cfg.evolution.seed = seed;
    Context ctx{cfg, fs::path(cfg.output_directory), out, resolution_factor};

    const auto* sub = app.get_subcommands().front();
    const auto& name = sub->get_name();
    if (name == "solve") return cmd_solve(ctx);
    if (name == "shoot") return cmd_shoot(ctx);
    if (name == "evolve") return cmd_evolve(ctx);
    if (name == "sweep") return cmd_sweep(ctx);
    return cmd_verify(ctx);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NonConvergenceError& e) {
    err << "numerical failure: " << e.what() << " (last residual " << e.last_residual() << ")\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ellstar
