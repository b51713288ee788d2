#include "ellstar/functional.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ellstar/errors.hpp"

namespace ellstar {

namespace {

constexpr double kPi = std::numbers::pi;

double multiplicity(int ell) { return 2.0 * ell + 1.0; }

int origin_parity(int ell) { return (ell % 2 == 0) ? -1 : 1; }  // (-1)^{l+1}

}  // namespace

void validate_components(std::span<const ComponentSpec> specs, bool require_positive_charge) {
  if (specs.empty()) throw ConfigError("component list is empty");
  for (std::size_t j = 0; j < specs.size(); ++j) {
    if (specs[j].ell < 0) {
      throw ConfigError("component " + std::to_string(j + 1) + ": ell must be >= 0");
    }
    if (j > 0 && specs[j].ell <= specs[j - 1].ell) {
      throw ConfigError("component ell values must be strictly increasing");
    }
    if (!std::isfinite(specs[j].target_N) || specs[j].target_N < 0.0 ||
        (require_positive_charge && specs[j].target_N <= 0.0)) {
      throw ConfigError("component " + std::to_string(j + 1) +
                        ": charge N must be positive, got " + std::to_string(specs[j].target_N));
    }
  }
}

// --- FieldState -------------------------------------------------------------

FieldState::FieldState(RadialGrid grid, std::vector<Component> components)
    : grid_(std::move(grid)), components_(std::move(components)) {
  for (const auto& c : components_) {
    require_same_grid(grid_, c.f.grid());
    if (c.spec.ell < 0) throw ConfigError("negative ell in field state");
  }
}

FieldState FieldState::zeros(const RadialGrid& grid, std::span<const ComponentSpec> specs) {
  std::vector<Component> comps;
  comps.reserve(specs.size());
  for (const auto& s : specs) comps.push_back({s, ComplexFunction(grid)});
  return FieldState(grid, std::move(comps));
}

std::vector<ComponentSpec> FieldState::specs() const {
  std::vector<ComponentSpec> out;
  for (const auto& c : components_) out.push_back(c.spec);
  return out;
}

std::vector<cplx> FieldState::reduced(std::size_t j) const {
  const auto r = grid_.nodes();
  const auto f = components_[j].f.values();
  std::vector<cplx> g(f.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = r[i] * f[i];
  return g;
}

void FieldState::set_reduced(std::size_t j, std::span<const cplx> g) {
  if (g.size() != grid_.size()) throw ShapeError("set_reduced: size mismatch");
  const auto r = grid_.nodes();
  auto f = components_[j].f.values();
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g[i] / r[i];
}

void require_same_structure(const FieldState& a, const FieldState& b) {
  require_same_grid(a.grid(), b.grid());
  if (a.size() != b.size()) throw ShapeError("field states have different component counts");
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].spec.ell != b[j].spec.ell) {
      throw ShapeError("field states differ in ell of component " + std::to_string(j + 1));
    }
  }
}

// --- operators --------------------------------------------------------------

SymTridiagonal kinetic_operator(const RadialGrid& grid, int ell) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const double centrifugal = static_cast<double>(ell) * (ell + 1);
  SymTridiagonal k;
  k.diag.resize(n);
  k.off.assign(n - 1, -inv_h2);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    k.diag[i] = 2.0 * inv_h2 + centrifugal / (r * r);
  }
  k.diag[0] -= origin_parity(ell) * inv_h2;
  k.diag[n - 1] += inv_h2;
  return k;
}

std::vector<double> external_diagonal(const RadialGrid& grid, int ell,
                                      const ExternalPotential& pot) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = pot(grid.node(i));
  const double m = pot.coulomb_strength();
  if (m != 0.0) {
    v[0] -= origin_parity(ell) * m / (2.0 * (ell + 1) * grid.spacing());
  }
  return v;
}

SymTridiagonal hamiltonian(const RadialGrid& grid, int ell, const ExternalPotential& pot,
                           std::span<const double> U) {
  SymTridiagonal h = kinetic_operator(grid, ell);
  const auto v = external_diagonal(grid, ell, pot);
  for (std::size_t i = 0; i < h.size(); ++i) h.diag[i] += v[i] + (U.empty() ? 0.0 : U[i]);
  return h;
}

// --- functionals ------------------------------------------------------------

RealFunction density(const FieldState& state) {
  RealFunction n(state.grid());
  for (const auto& c : state) {
    const double pref = multiplicity(c.spec.ell) / (4.0 * kPi);
    for (std::size_t i = 0; i < n.size(); ++i) n[i] += pref * std::norm(c.f[i]);
  }
  return n;
}

std::vector<double> charges(const FieldState& state) {
  std::vector<double> out;
  const auto w = state.grid().weights();
  for (const auto& c : state) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::norm(c.f[i]);
    out.push_back(multiplicity(c.spec.ell) * s);
  }
  return out;
}

namespace {

// g^H K g h, written as a sum of squares
double kinetic_form(const RadialGrid& grid, int ell, std::span<const cplx> g) {
  const std::size_t n = g.size();
  const double h = grid.spacing();
  double grad = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) grad += std::norm(g[i + 1] - g[i]);
  grad += (1.0 - origin_parity(ell)) * std::norm(g[0]);
  grad += 2.0 * std::norm(g[n - 1]);
  double cent = 0.0;
  if (ell > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = grid.node(i);
      cent += std::norm(g[i]) / (r * r);
    }
    cent *= static_cast<double>(ell) * (ell + 1) * h;
  }
  return grad / h + cent;
}

}  // namespace

double kinetic(const FieldState& state) {
  double t = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j) {
    const int ell = state[j].spec.ell;
    t += 0.5 * multiplicity(ell) * kinetic_form(state.grid(), ell, state.reduced(j));
  }
  return t;
}

double external_energy(const FieldState& state, const ExternalPotential& pot) {
  if (pot.kind == PotentialKind::none || pot.mass == 0.0) return 0.0;
  const double h = state.grid().spacing();
  double l = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j) {
    const int ell = state[j].spec.ell;
    const auto v = external_diagonal(state.grid(), ell, pot);
    const auto g = state.reduced(j);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s -= v[i] * std::norm(g[i]);
    l += 0.5 * multiplicity(ell) * h * s;
  }
  return l;
}

double self_energy(const RealFunction& n, const GravPotential& grav) {
  const auto w = n.grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += grav.U[i] * n[i] * w[i];
  return -kPi * s;
}

double self_energy(const FieldState& state) {
  const auto n = density(state);
  return self_energy(n, solve_poisson(n));
}

EnergyBreakdown total_energy(const FieldState& state, const ExternalPotential& pot) {
  EnergyBreakdown e;
  e.T = kinetic(state);
  e.L = external_energy(state, pot);
  e.D = self_energy(state);
  e.E = e.T - e.L - e.D;
  return e;
}

cplx h1_inner(const FieldState& a, const FieldState& b, std::size_t j) {
  const int ell = a[j].spec.ell;
  const auto ga = a.reduced(j);
  const auto gb = b.reduced(j);
  const auto k = kinetic_operator(a.grid(), ell);
  std::vector<cplx> kb(gb.size());
  k.apply<cplx>(gb, kb);
  cplx s{};
  for (std::size_t i = 0; i < ga.size(); ++i) s += std::conj(ga[i]) * (gb[i] + kb[i]);
  return multiplicity(ell) * a.grid().spacing() * s;
}

double h1_norm(const FieldState& state) {
  double s = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j) {
    const int ell = state[j].spec.ell;
    const auto g = state.reduced(j);
    double l2 = 0.0;
    for (const auto& x : g) l2 += std::norm(x);
    s += multiplicity(ell) * (state.grid().spacing() * l2 + kinetic_form(state.grid(), ell, g));
  }
  return std::sqrt(s);
}

double h1_distance_mod_phase(const FieldState& a, const FieldState& b) {
  require_same_structure(a, b);
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const cplx overlap = h1_inner(a, b, j);
    const cplx phase = std::abs(overlap) > 0.0 ? std::conj(overlap) / std::abs(overlap) : cplx{1.0};
    const int ell = a[j].spec.ell;
    const auto ga = a.reduced(j);
    auto gb = b.reduced(j);
    double l2 = 0.0;
    for (std::size_t i = 0; i < gb.size(); ++i) {
      gb[i] = ga[i] - phase * gb[i];
      l2 += std::norm(gb[i]);
    }
    total += multiplicity(ell) * (a.grid().spacing() * l2 + kinetic_form(a.grid(), ell, gb));
  }
  return std::sqrt(total);
}

// --- resampling -------------------------------------------------------------

template <typename T>
T interpolate(const RadialFunction<T>& f, int ell, double r) {
  const auto& grid = f.grid();
  const double h = grid.spacing();
  const auto n = static_cast<long>(grid.size());
  if (r < 0.0) r = -r;
  if (r >= grid.r_max()) return T{};
  const double s = r / h - 0.5;
  const long base = static_cast<long>(std::floor(s)) - 1;
  const double sign = (ell % 2 == 0) ? 1.0 : -1.0;
  auto sample = [&](long k) -> T {
    if (k < 0) return sign * f[static_cast<std::size_t>(-k - 1)];
    if (k >= n) return T{};
    return f[static_cast<std::size_t>(k)];
  };
  const double t = s - static_cast<double>(base);  // in [1, 2)
  const double x0 = t, x1 = t - 1.0, x2 = t - 2.0, x3 = t - 3.0;
  return sample(base) * (-x1 * x2 * x3 / 6.0) + sample(base + 1) * (x0 * x2 * x3 / 2.0) +
         sample(base + 2) * (-x0 * x1 * x3 / 2.0) + sample(base + 3) * (x0 * x1 * x2 / 6.0);
}

template <typename T>
RadialFunction<T> resample_scaled(const RadialFunction<T>& f, int ell, double lambda,
                                  double power, const RadialGrid& target) {
  if (!(lambda > 0.0)) throw DomainError("resample: lambda must be positive");
  RadialFunction<T> out(target);
  const double amp = std::pow(lambda, power);
  for (std::size_t i = 0; i < target.size(); ++i) {
    out[i] = amp * interpolate(f, ell, lambda * target.node(i));
  }
  return out;
}

template <typename T>
RadialFunction<T> resample_scaled(const RadialFunction<T>& f, int ell, double lambda,
                                  double power) {
  return resample_scaled(f, ell, lambda, power, f.grid());
}

template double interpolate(const RadialFunction<double>&, int, double);
template cplx interpolate(const RadialFunction<cplx>&, int, double);
template RadialFunction<double> resample_scaled(const RadialFunction<double>&, int, double,
                                                double);
template RadialFunction<cplx> resample_scaled(const RadialFunction<cplx>&, int, double, double);
template RadialFunction<double> resample_scaled(const RadialFunction<double>&, int, double,
                                                double, const RadialGrid&);
template RadialFunction<cplx> resample_scaled(const RadialFunction<cplx>&, int, double, double,
                                              const RadialGrid&);

FieldState rescale_state(const FieldState& state, double lambda, double power) {
  std::vector<Component> comps;
  for (const auto& c : state) {
    comps.push_back({c.spec, resample_scaled(c.f, c.spec.ell, lambda, power)});
  }
  return FieldState(state.grid(), std::move(comps));
}

}  // namespace ellstar
