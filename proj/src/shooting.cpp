#include "ellstar/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ellstar/errors.hpp"

namespace ellstar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHuge = 1e200;
constexpr std::size_t kAutoPoints = 16384;
constexpr double kDecayLengths = 30.0;

// g'' = (base(r) - omega) g on nodes 0..n, node n sitting at r_max + h/2.
struct RadialProblem {
  int ell;
  RadialGrid grid;
  double coulomb;  // M of a -M/r singularity
  double w0;       // regular part of V + U at r = 0
  std::vector<double> radius;
  std::vector<double> base;
};

RadialProblem make_problem(int ell, const ExternalPotential& pot, std::span<const double> U,
                           const RadialGrid& grid) {
  const std::size_t n = grid.size();
  RadialProblem p{ell, grid, pot.coulomb_strength(), pot.regular_value_at_origin(), {}, {}};
  p.radius.resize(n + 1);
  p.base.resize(n + 1);
  const double cent = static_cast<double>(ell) * (ell + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * grid.spacing();
    double u = 0.0;
    if (!U.empty()) u = i < n ? U[i] : U[n - 1] * p.radius[n - 1] / r;
    p.radius[i] = r;
    p.base[i] = cent / (r * r) + pot(r) + u;
  }
  if (!U.empty()) p.w0 += (9.0 * U[0] - U[1]) / 8.0;
  return p;
}

// Frobenius series r^{l+1} (1 + c1 r + c2 r^2 + c3 r^3) of the regular solution.
double series_start(const RadialProblem& p, double omega, double r) {
  const double k0 = p.w0 - omega;
  const double two_l1 = 2.0 * p.ell + 1.0;
  double c[4] = {1.0, 0.0, 0.0, 0.0};
  for (int k = 1; k <= 3; ++k) {
    double num = -p.coulomb * c[k - 1];
    if (k >= 2) num += k0 * c[k - 2];
    c[k] = num / (k * (two_l1 + k));
  }
  return std::pow(r, p.ell + 1) * (c[0] + r * (c[1] + r * (c[2] + r * c[3])));
}

double numerov_factor(const RadialProblem& p, double omega, std::size_t i) {
  const double h = p.grid.spacing();
  return 1.0 - h * h * (p.base[i] - omega) / 12.0;
}

// Outward solution; returns the node count over nodes 0..n. If `store` is
// given, the unscaled values up to `stop` are written to it.
int integrate_out(const RadialProblem& p, double omega, double c, std::vector<double>* store,
                  std::size_t stop) {
  const std::size_t last = p.radius.size() - 1;
  double g_prev = c * series_start(p, omega, p.radius[0]);
  double g_cur = c * series_start(p, omega, p.radius[1]);
  if (store) {
    store->assign(stop + 1, 0.0);
    (*store)[0] = g_prev;
    if (stop >= 1) (*store)[1] = g_cur;
  }
  int nodes = (g_prev * g_cur < 0.0) ? 1 : 0;
  double f_prev = numerov_factor(p, omega, 0);
  double f_cur = numerov_factor(p, omega, 1);
  for (std::size_t i = 1; i < last; ++i) {
    const double f_next = numerov_factor(p, omega, i + 1);
    const double g_next = ((12.0 - 10.0 * f_cur) * g_cur - f_prev * g_prev) / f_next;
    if (g_next * g_cur < 0.0) ++nodes;
    g_prev = g_cur;
    g_cur = g_next;
    f_prev = f_cur;
    f_cur = f_next;
    if (store) {
      if (i + 1 <= stop) (*store)[i + 1] = g_cur;
      if (i + 1 >= stop) store = nullptr;
    }
    if (std::abs(g_cur) > kHuge) {
      if (store) throw NumericalError("outward shooting overflow before the matching point");
      g_cur /= kHuge;
      g_prev /= kHuge;
    }
  }
  return nodes;
}

double bisect_eigenvalue(const RadialProblem& p, int n_nodes) {
  double lo = *std::min_element(p.base.begin(), p.base.end());
  double hi = 0.0;
  if (lo >= hi) throw BracketError("potential has no negative region; no bound state");
  lo -= 1e-3 * std::abs(lo);
  for (int k = 0; integrate_out(p, lo, 1.0, nullptr, 0) > n_nodes; ++k) {
    if (k > 60) throw BracketError("could not bracket the eigenvalue from below");
    lo *= 2.0;
  }
  if (integrate_out(p, hi, 1.0, nullptr, 0) <= n_nodes) {
    std::ostringstream msg;
    msg << "no bound state with " << n_nodes << " nodes below omega = 0 on r_max = "
        << p.grid.r_max();
    throw BracketError(msg.str());
  }
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (integrate_out(p, mid, 1.0, nullptr, 0) > n_nodes) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Eigenfunction g on nodes 0..n-1 for a known eigenvalue.
std::vector<double> assemble_profile(const RadialProblem& p, double omega, double c) {
  const std::size_t n = p.grid.size();
  std::size_t match = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.base[i] - omega < 0.0) match = i;
  }
  match = std::clamp<std::size_t>(match + 1, 2, n - 8);

  std::vector<double> out;
  integrate_out(p, omega, c, &out, match);

  // inward from g(r_n) = 0
  std::vector<double> in(n + 1, 0.0);
  in[n] = 0.0;
  in[n - 1] = 1e-280;
  for (std::size_t i = n - 1; i > match; --i) {
    const double f_i = numerov_factor(p, omega, i);
    const double f_next = numerov_factor(p, omega, i + 1);
    const double f_prev = numerov_factor(p, omega, i - 1);
    in[i - 1] = ((12.0 - 10.0 * f_i) * in[i] - f_next * in[i + 1]) / f_prev;
    if (std::abs(in[i - 1]) > kHuge) {
      for (std::size_t k = i - 1; k <= n; ++k) in[k] /= kHuge;
    }
  }
  const double scale = out[match] / in[match];
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = i <= match ? out[i] : scale * in[i];
  return g;
}

RealFunction profile_from_reduced(const RadialGrid& grid, std::span<const double> g) {
  RealFunction f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = g[i] / grid.node(i);
  return f;
}

std::vector<double> multiplet_density(const RealFunction& f, int ell) {
  std::vector<double> n(f.size());
  const double pref = (2.0 * ell + 1.0) / (4.0 * kPi);
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = pref * f[i] * f[i];
  return n;
}

// Fourth-order cumulative integrals of F on cell-centered nodes, from the
// origin to each node. F has parity `parity` under r -> -r.
std::vector<double> cumulative_from_origin(std::span<const double> F, double h, double parity) {
  const std::size_t n = F.size();
  auto at = [&](long k) -> double {
    if (k < 0) return parity * F[static_cast<std::size_t>(-k - 1)];
    if (k >= static_cast<long>(n)) return 0.0;
    return F[static_cast<std::size_t>(k)];
  };
  std::vector<double> I(n);
  // half cell [0, h/2]: cubic through the four symmetric samples
  I[0] = parity > 0 ? h * (13.0 * F[0] - F[1]) / 24.0 : h * (51.0 * F[0] - F[1]) / 192.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const long k = static_cast<long>(i);
    I[i + 1] = I[i] + h * (-at(k - 1) + 13.0 * at(k) + 13.0 * at(k + 1) - at(k + 2)) / 24.0;
  }
  return I;
}

double quad4_total(std::span<const double> F_even, double h) {
  const auto I = cumulative_from_origin(F_even, h, 1.0);
  return I.back() + 0.5 * h * F_even.back();
}

double charge_of(const RealFunction& f, int ell) {
  std::vector<double> F(f.size());
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double r = f.grid().node(i);
    F[i] = f[i] * f[i] * r * r;
  }
  return (2.0 * ell + 1.0) * quad4_total(F, f.grid().spacing());
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

ShootResult finish(int ell, const RealFunction& f, double omega, double c,
                   const ExternalPotential& pot, bool self_gravity, int iterations) {
  ShootResult res{ell, f, omega, count_nodes(f), charge_of(f, ell), c, {}, pot, self_gravity,
                  true, iterations};
  const FieldState s = res.to_state();
  res.energy.T = kinetic(s);
  res.energy.L = external_energy(s, pot);
  res.energy.D = self_gravity ? self_energy(s) : 0.0;
  res.energy.E = res.energy.T - res.energy.L - res.energy.D;
  return res;
}

double outermost_turning_point(const ShootResult& r) {
  const auto& grid = r.profile.grid();
  double peak = 0.0, at = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = std::abs(r.profile[i]) * grid.node(i);
    if (a > peak) peak = a;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(r.profile[i]) * grid.node(i) > 1e-3 * peak) at = grid.node(i);
  }
  return at;
}

}  // namespace

FieldState ShootResult::to_state() const {
  ComplexFunction fc(profile.grid());
  for (std::size_t i = 0; i < fc.size(); ++i) fc[i] = profile[i];
  return FieldState(profile.grid(), {Component{{ell, N_achieved}, fc}});
}

int count_nodes(std::span<const double> f) {
  const double floor = 1e-12 * sup_abs(f);
  int nodes = 0;
  double last = 0.0;
  for (double v : f) {
    if (std::abs(v) <= floor) continue;
    if (last != 0.0 && v * last < 0.0) ++nodes;
    last = v;
  }
  return nodes;
}

int count_nodes(const RealFunction& f) { return count_nodes(f.values()); }

std::vector<double> poisson_high_order(std::span<const double> density, const RadialGrid& grid) {
  const std::size_t n = grid.size();
  if (density.size() != n) throw ShapeError("poisson_high_order: size mismatch");
  const double h = grid.spacing();
  std::vector<double> F_in(n), F_out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    F_in[i] = density[i] * r * r;
    F_out[i] = density[i] * r;
  }
  const auto inner = cumulative_from_origin(F_in, h, 1.0);
  const auto outer_from_origin = cumulative_from_origin(F_out, h, -1.0);
  const double outer_total = outer_from_origin.back() + 0.5 * h * F_out.back();
  std::vector<double> U(n);
  for (std::size_t i = 0; i < n; ++i) {
    U[i] = -inner[i] / grid.node(i) - (outer_total - outer_from_origin[i]);
  }
  return U;
}

ShootResult solve_frozen(int ell, int n_nodes, const ExternalPotential& pot,
                         std::span<const double> U, double central_value,
                         const RadialGrid& grid) {
  if (ell < 0 || n_nodes < 0) throw DomainError("ell and n_nodes must be >= 0");
  if (!(central_value > 0.0)) throw DomainError("central value must be positive");
  if (!U.empty() && U.size() != grid.size()) throw ShapeError("solve_frozen: U size mismatch");
  pot.validate();
  const auto p = make_problem(ell, pot, U, grid);
  const double omega = bisect_eigenvalue(p, n_nodes);
  const auto f = profile_from_reduced(grid, assemble_profile(p, omega, central_value));
  return finish(ell, f, omega, central_value, pot, false, 1);
}

ShootResult shoot_stationary(int ell, int n_nodes, const ExternalPotential& pot,
                             bool self_gravity, double central_value, const RadialGrid& grid,
                             const ShootOptions& options) {
  if (!self_gravity) return solve_frozen(ell, n_nodes, pot, {}, central_value, grid);
  if (ell < 0 || n_nodes < 0) throw DomainError("ell and n_nodes must be >= 0");
  if (!(central_value > 0.0)) throw DomainError("central value must be positive");
  pot.validate();

  // initial self-potential from a Gaussian of the natural width for this central value
  const double width = 2.0 * (ell + 1.0) * (n_nodes + 1.0) * std::pow(central_value, -1.0 / (ell + 2.0));
  RealFunction guess(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i);
    guess[i] = central_value * std::pow(r, ell) * std::exp(-0.5 * r * r / (width * width));
  }
  std::vector<double> U = poisson_high_order(multiplet_density(guess, ell), grid);

  double change = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const auto p = make_problem(ell, pot, U, grid);
    const double omega = bisect_eigenvalue(p, n_nodes);
    const auto f = profile_from_reduced(grid, assemble_profile(p, omega, central_value));
    const auto U_new = poisson_high_order(multiplet_density(f, ell), grid);
    change = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i) change = std::max(change, std::abs(U_new[i] - U[i]));
    change /= std::max(sup_abs(U_new), 1e-300);
    if (change < options.potential_tolerance) {
      // one more eigen-solve in the converged potential
      const auto pf = make_problem(ell, pot, U_new, grid);
      const double w = bisect_eigenvalue(pf, n_nodes);
      const auto ff = profile_from_reduced(grid, assemble_profile(pf, w, central_value));
      return finish(ell, ff, w, central_value, pot, true, it);
    }
    for (std::size_t i = 0; i < U.size(); ++i) {
      U[i] = (1.0 - options.mixing) * U[i] + options.mixing * U_new[i];
    }
  }
  std::ostringstream msg;
  msg << "self-consistent shooting stalled after " << options.max_iterations
      << " iterations (relative U change " << change << ")";
  throw NonConvergenceError(msg.str(), change);
}

ShootResult rescale_solution(const ShootResult& result, double lambda, const RadialGrid& target) {
  if (!(lambda > 0.0)) throw DomainError("rescale: lambda must be positive");
  ShootResult out = result;
  out.profile = resample_scaled(result.profile, result.ell, lambda, 2.0, target);
  out.omega = lambda * lambda * result.omega;
  out.N_achieved = lambda * result.N_achieved;
  out.central_value = std::pow(lambda, 2.0 + result.ell) * result.central_value;
  const double l3 = lambda * lambda * lambda;
  out.energy = {l3 * result.energy.T, l3 * result.energy.L, l3 * result.energy.D,
                l3 * result.energy.E};
  out.potential = result.potential.scaled(lambda);
  out.nodes = count_nodes(out.profile);
  return out;
}

ShootResult rescale_solution(const ShootResult& result, double lambda) {
  return rescale_solution(result, lambda, result.profile.grid());
}

ShootResult shoot_auto_grid(int ell, int n_nodes, const ExternalPotential& pot,
                            bool self_gravity, double central_value, std::size_t n_points,
                            const ShootOptions& options) {
  if (!(central_value > 0.0)) throw DomainError("central value must be positive");
  double r_max = 40.0 * (ell + 1.0) * (n_nodes + 1.0) * std::pow(central_value, -1.0 / (ell + 2.0));
  if (pot.mass > 0.0) r_max = std::min(r_max, 80.0 * (ell + 1.0) * (n_nodes + 1.0) / pot.mass);
  ShootResult res = shoot_stationary(ell, n_nodes, pot, self_gravity, central_value,
                                     RadialGrid(r_max, n_points), options);
  for (int pass = 0; pass < 4; ++pass) {
    const double next =
        outermost_turning_point(res) + kDecayLengths / std::sqrt(std::abs(res.omega));
    const bool settled = std::abs(next - r_max) < 0.05 * r_max;
    r_max = next;
    res = shoot_stationary(ell, n_nodes, pot, self_gravity, central_value,
                           RadialGrid(r_max, n_points), options);
    if (settled) break;
  }
  return res;
}

ShootResult shoot_to_charge(int ell, int n_nodes, const ExternalPotential& pot, double target_N,
                            const RadialGrid& grid, const ShootOptions& options) {
  if (!(target_N > 0.0)) throw DomainError("target charge must be positive");
  const bool external = pot.kind != PotentialKind::none && pot.mass > 0.0;

  if (!external) {
    const ShootResult unit = shoot_auto_grid(ell, n_nodes, pot, true, 1.0, kAutoPoints, options);
    return rescale_solution(unit, target_N / unit.N_achieved, grid);
  }

  // secant on log c against log N
  double c0 = 1e-3, c1 = 1e-2;
  ShootResult s0 = shoot_stationary(ell, n_nodes, pot, true, c0, grid, options);
  ShootResult s1 = shoot_stationary(ell, n_nodes, pot, true, c1, grid, options);
  for (int it = 0; it < 60; ++it) {
    if (std::abs(s1.N_achieved - target_N) <= 1e-12 * target_N) return s1;
    const double x0 = std::log(c0), x1 = std::log(c1);
    const double y0 = std::log(s0.N_achieved / target_N);
    const double y1 = std::log(s1.N_achieved / target_N);
    double x2 = (y1 == y0) ? x1 - y1 / 2.0 : x1 - y1 * (x1 - x0) / (y1 - y0);
    x2 = std::clamp(x2, x1 - 3.0, x1 + 3.0);
    c0 = c1;
    s0 = std::move(s1);
    c1 = std::exp(x2);
    s1 = shoot_stationary(ell, n_nodes, pot, true, c1, grid, options);
  }
  throw NonConvergenceError("central value search did not reach the target charge",
                            std::abs(s1.N_achieved - target_N) / target_N);
}

}  // namespace ellstar
