#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ellstar/errors.hpp"
#include "ellstar/groundstate.hpp"
#include "ellstar/shooting.hpp"
#include "helpers.hpp"

using namespace ellstar;
using ellstar::test::relative_gap;

namespace {

double max_abs(const RealFunction& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("hydrogen ground state") {
  const RadialGrid g(60.0, 8192);
  const auto res = solve_frozen(0, 0, ExternalPotential::point_mass(1.0), {}, 1.0, g);
  CHECK(res.omega == doctest::Approx(-0.25).epsilon(1e-9));
  CHECK(res.nodes == 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    worst = std::max(worst, std::abs(res.profile[i] - std::exp(-0.5 * g.node(i))));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("hydrogen excited states") {
  const RadialGrid g(200.0, 16384);
  const auto pot = ExternalPotential::point_mass(1.0);
  const auto p = solve_frozen(1, 0, pot, {}, 1.0, g);
  CHECK(p.omega == doctest::Approx(-1.0 / 16.0).epsilon(1e-9));
  const auto s2 = solve_frozen(0, 1, pot, {}, 1.0, g);
  CHECK(s2.omega == doctest::Approx(-1.0 / 16.0).epsilon(1e-9));
  CHECK(s2.nodes == 1);
  // 2s profile (1 - r/4) e^{-r/4}, node at r = 4
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i);
    CHECK(s2.profile[i] == doctest::Approx((1.0 - 0.25 * r) * std::exp(-0.25 * r)).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("self-consistent ground state satisfies the virial relation") {
  for (int ell : {0, 1}) {
    const auto res = shoot_auto_grid(ell, 0, ExternalPotential::none(), true, 1.0);
    REQUIRE(res.converged);
    const auto& e = res.energy;
    CHECK(std::abs(2.0 * e.T - e.L - e.D) <= 1e-6 * std::abs(e.E));
    CHECK(res.omega < 0.0);
    CHECK(res.nodes == 0);
    CHECK(res.N_achieved == doctest::Approx(charges(res.to_state())[0]).epsilon(1e-12));
    CHECK(res.omega == doctest::Approx(6.0 * res.energy.E / res.N_achieved).epsilon(1e-6));
  }
  const auto bh = shoot_auto_grid(0, 0, ExternalPotential::point_mass(1.0), true, 0.5);
  CHECK(std::abs(2.0 * bh.energy.T - bh.energy.L - bh.energy.D) <= 1e-6 * std::abs(bh.energy.E));
}

TEST_CASE("count_nodes") {
  const RadialGrid g(10.0, 1000);
  RealFunction decay(g), one(g), zero(g), noisy(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i);
    decay[i] = std::exp(-r);
    one[i] = (1.0 - r) * std::exp(-r);
    noisy[i] = std::exp(-r) + ((i % 2) ? 1e-14 : -1e-14) * (r > 9.0);
  }
  CHECK(count_nodes(decay) == 0);
  CHECK(count_nodes(one) == 1);
  CHECK(count_nodes(zero) == 0);
  CHECK(count_nodes(std::vector<double>{1.0, -1.0, 0.0, 1.0, 2.0, -3.0}) == 3);
  CHECK(count_nodes(std::vector<double>{}) == 0);
}

TEST_CASE("rescaling a self-gravitating solution") {
  const auto base = shoot_auto_grid(0, 0, ExternalPotential::none(), true, 1.0);
  const auto same = rescale_solution(base, 1.0);
  for (std::size_t i = 0; i < base.profile.size(); ++i) {
    CHECK(same.profile[i] == doctest::Approx(base.profile[i]).epsilon(1e-14));
  }
  CHECK(same.omega == base.omega);

  const auto twice = rescale_solution(base, 2.0);
  CHECK(twice.N_achieved == doctest::Approx(2.0 * base.N_achieved));
  CHECK(twice.omega == doctest::Approx(4.0 * base.omega));
  CHECK(twice.energy.E == doctest::Approx(8.0 * base.energy.E));
  CHECK_THROWS_AS(rescale_solution(base, 0.0), DomainError);
  CHECK_THROWS_AS(rescale_solution(base, -1.0), DomainError);

  // resampled state still solves the equation, with M scaled along
  const auto bh = shoot_auto_grid(1, 0, ExternalPotential::point_mass(0.5), true, 0.3);
  for (double lambda : {0.8, 1.25}) {
    const auto scaled = rescale_solution(bh, lambda);
    CHECK(scaled.potential.mass == doctest::Approx(0.5 * lambda));
    CHECK(residual(scaled.to_state(), scaled.potential) < 1e-6);
    CHECK(relative_gap(charges(scaled.to_state())[0], lambda * bh.N_achieved) < 1e-6);
  }
}

TEST_CASE("frozen spectrum is ordered by node count") {
  const RadialGrid g(80.0, 8192);
  std::vector<double> dens(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) dens[i] = std::exp(-g.node(i) / 3.0);
  const auto U = poisson_high_order(dens, g);
  for (int ell : {0, 2}) {
    double last = -INFINITY;
    for (int n = 0; n <= 2; ++n) {
      const auto res = solve_frozen(ell, n, ExternalPotential::point_mass(1.0), U, 1.0, g);
      CHECK(res.nodes == n);
      CHECK(count_nodes(res.profile) == n);
      CHECK(res.omega > last);
      CHECK(res.omega < 0.0);
      last = res.omega;
    }
  }
}

TEST_CASE("excited self-gravitating states") {
  for (int n : {1, 2}) {
    const auto res = shoot_auto_grid(0, n, ExternalPotential::none(), true, 1.0);
    CHECK(res.converged);
    CHECK(res.nodes == n);
    CHECK(count_nodes(res.profile) == n);
    CHECK(res.omega < 0.0);
  }
}

TEST_CASE("no bound state is a bracket error") {
  const RadialGrid g(20.0, 512);
  CHECK_THROWS_AS(solve_frozen(0, 0, ExternalPotential::none(), {}, 1.0, g), BracketError);
  CHECK_THROWS_AS(solve_frozen(0, -1, ExternalPotential::point_mass(1.0), {}, 1.0, g),
                  DomainError);
}

TEST_CASE("high-order Poisson quadrature") {
  const RadialGrid g(4.0, 4096);
  std::vector<double> n(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i);
    n[i] = std::exp(-r * r);
  }
  const auto U = poisson_high_order(n, g);
  // closed form for n = exp(-r^2): -(1/4) sqrt(pi) erf(r)/r, minus the missing tail
  for (std::size_t i = 0; i < g.size(); i += 97) {
    const double r = g.node(i);
    const double exact = -0.25 * std::sqrt(std::numbers::pi) * std::erf(r) / r + 0.5 * std::exp(-16.0);
    CHECK(U[i] == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("shooting agrees with the minimizer") {
  for (int ell : {0, 1, 2}) {
    for (double M : {0.0, 1.0}) {
      const double N = 1.0;
      const auto pot = M > 0.0 ? ExternalPotential::point_mass(M) : ExternalPotential::none();
      const std::vector<ComponentSpec> specs{{ell, N}};
      const RadialGrid g(auto_radius(specs, pot), 16384);
      const auto mini = minimize(specs, pot, g);
      const auto shot = shoot_to_charge(ell, 0, pot, N, g);
      CHECK(relative_gap(shot.N_achieved, N) < 1e-9);
      CHECK(relative_gap(shot.omega, mini.omegas[0]) <= 1e-5);
      const double amp = max_abs(shot.profile);
      const double sign = mini.state[0].f[0].real() > 0.0 ? 1.0 : -1.0;
      double worst = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        worst = std::max(worst, std::abs(sign * mini.state[0].f[i].real() - shot.profile[i]));
      }
      CHECK(worst <= 1e-4 * amp);
    }
  }
}
