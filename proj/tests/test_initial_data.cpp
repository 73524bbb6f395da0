#include <doctest.h>

#include <cmath>

#include "penrose/initial_data.hpp"
#include "penrose/scenario.hpp"

using namespace penrose;

namespace {

ScenarioSpec spec_of(Family f, double r_min, double r_b, std::size_t n,
                     double m = 1.0) {
  ScenarioSpec s;
  s.family = f;
  s.r_min = r_min;
  s.r_b = r_b;
  s.grid_count = n;
  s.m = m;
  return s;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("grid utilities") {
  auto g = RadialGrid::uniform(0.0, 1.0, 33);
  CHECK(g.count() == 33);
  CHECK(g.spacing() == doctest::Approx(1.0 / 32.0));
  CHECK_THROWS_AS(RadialGrid::uniform(0.0, 1.0, 8), DegenerateInputError);
  CHECK_THROWS_AS(RadialGrid::from_nodes({0, 1, 1, 2}), DegenerateInputError);

  // derivative of sin on a uniform grid is 2nd order
  std::vector<double> x = g.nodes, y(g.count());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::sin(3.0 * x[i]);
  auto d = fd::derivative(x, y);
  double err = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    err = std::max(err, std::abs(d[i] - 3.0 * std::cos(3.0 * x[i])));
  CHECK(err < 1e-2);

  // Simpson integral of sin over [0, 1]
  const double I = integrate(x, y);
  CHECK(I == doctest::Approx((1.0 - std::cos(3.0)) / 3.0).epsilon(1e-6));

  // tridiagonal solve vs a known 3x3
  std::vector<double> lo{0, 1, 1}, di{2, 2, 2}, up{1, 1, 0}, rhs{1, 2, 3};
  auto sol = solve_tridiagonal(lo, di, up, rhs);
  CHECK(2 * sol[0] + sol[1] == doctest::Approx(1.0));
  CHECK(sol[0] + 2 * sol[1] + sol[2] == doctest::Approx(2.0));
  CHECK(sol[1] + 2 * sol[2] == doctest::Approx(3.0));
}

TEST_CASE("constraints: flat ball is vacuum") {
  auto data = build_initial_data(spec_of(Family::flat, 0.1, 3.0, 256));
  auto em = compute_constraints(data);
  CHECK(max_abs(em.mu) < 1e-10);
  CHECK(max_abs(em.J_r) < 1e-10);
  CHECK(check_dec(em, data).holds);
}

TEST_CASE("constraints: Schwarzschild slice is vacuum to O(dr^2)") {
  auto data =
      build_initial_data(spec_of(Family::schwarzschild, 2.5, 4.0, 1024));
  auto em = compute_constraints(data);
  const double dr = data.grid().spacing();
  CHECK(max_abs(em.mu) < 8.0 * dr * dr);
  CHECK(max_abs(em.J_r) < 8.0 * dr * dr);
  CHECK(check_dec(em, data, 8.0 * dr * dr).holds);
}

TEST_CASE("constraints: PG slice is vacuum to O(dr^2)") {
  auto data =
      build_initial_data(spec_of(Family::painleve_gullstrand, 1.0, 4.0, 2048));
  auto em = compute_constraints(data);
  const double dr = data.grid().spacing();
  CHECK(max_abs(em.mu) < 8.0 * dr * dr);
  CHECK(max_abs(em.J_r) < 8.0 * dr * dr);
}

TEST_CASE("constraints: interior Schwarzschild star has mu = rho0") {
  ScenarioSpec s = spec_of(Family::constant_density_star, 0.1, 4.0, 1024);
  s.rho0 = 1e-3;
  auto data = build_initial_data(s);
  auto em = compute_constraints(data);
  const double dr = data.grid().spacing();
  for (double mu : em.mu) CHECK(mu == doctest::Approx(1e-3).epsilon(1e-4));
  CHECK(max_abs(em.J_r) < 8.0 * dr * dr);
}

TEST_CASE("constraints: vacuum convergence order >= 2 (Richardson)") {
  auto err_at = [](std::size_t n) {
    auto data = build_initial_data(
        spec_of(Family::painleve_gullstrand, 1.0, 4.0, n));
    auto em = compute_constraints(data);
    // mu is algebraically exact for PG (flat metric); J carries the
    // finite-difference error, so measure the order on J.
    double e = 0.0;
    for (double j : em.J_r) e = std::max(e, std::abs(j));
    return e;
  };
  const double e1 = err_at(256), e2 = err_at(512), e3 = err_at(1024);
  const double p12 = std::log2(e1 / e2), p23 = std::log2(e2 / e3);
  CHECK(p12 > 1.9);
  CHECK(p23 > 1.9);
}

TEST_CASE("dec: negated star density fails") {
  ScenarioSpec s = spec_of(Family::constant_density_star, 0.1, 4.0, 256);
  s.rho0 = 1e-3;
  auto data = build_initial_data(s);
  auto em = compute_constraints(data);
  for (auto& mu : em.mu) mu = -mu;
  CHECK_FALSE(check_dec(em, data).holds);
}

TEST_CASE("sphere_geometry closed forms") {
  SUBCASE("flat r=2") {
    auto data = build_initial_data(spec_of(Family::flat, 0.1, 3.0, 512));
    auto s = sphere_geometry(data, 2.0);
    CHECK(s.area == doctest::Approx(16.0 * kPi).epsilon(1e-10));
    CHECK(s.H == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.tr_sigma_k == doctest::Approx(0.0));
  }
  SUBCASE("Schwarzschild m=1 r=4") {
    auto data =
        build_initial_data(spec_of(Family::schwarzschild, 2.5, 4.5, 2048));
    auto s = sphere_geometry(data, 4.0);
    CHECK(s.area == doctest::Approx(64.0 * kPi).epsilon(1e-10));
    CHECK(s.H == doctest::Approx(0.5 * std::sqrt(0.5)).epsilon(1e-8));
  }
  SUBCASE("Schwarzschild H profile matches (2/r)sqrt(1-2m/r) everywhere") {
    auto data =
        build_initial_data(spec_of(Family::schwarzschild, 2.5, 4.5, 2048));
    const double dr = data.grid().spacing();
    for (double r : {2.6, 3.0, 3.33, 3.8, 4.2}) {
      auto s = sphere_geometry(data, r);
      const double exact = (2.0 / r) * std::sqrt(1.0 - 2.0 / r);
      CHECK(std::abs(s.H - exact) < 8.0 * dr * dr);
    }
  }
  SUBCASE("PG m=1 r=4") {
    auto data = build_initial_data(
        spec_of(Family::painleve_gullstrand, 1.0, 4.5, 2048));
    auto s = sphere_geometry(data, 4.0);
    CHECK(s.H == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(s.tr_sigma_k ==
          doctest::Approx(2.0 * std::sqrt(0.5) / 4.0).epsilon(1e-8));
  }
  SUBCASE("out of range") {
    auto data = build_initial_data(spec_of(Family::flat, 0.1, 3.0, 64));
    CHECK_THROWS_AS(sphere_geometry(data, 5.0), std::out_of_range);
  }
}

TEST_CASE("admissible boundary") {
  SUBCASE("PG r_b=4 is admissible") {
    auto data = build_initial_data(
        spec_of(Family::painleve_gullstrand, 1.0, 4.0, 1024));
    CHECK(check_admissible_boundary(data).holds);
  }
  SUBCASE("PG r_b=2 sits on the horizon: not admissible") {
    auto data = build_initial_data(
        spec_of(Family::painleve_gullstrand, 0.5, 2.0, 1024));
    CHECK_FALSE(check_admissible_boundary(data).holds);
  }
  SUBCASE("monotone in boundary radius across 2m") {
    for (double rb : {1.6, 1.8, 2.0}) {
      auto data = build_initial_data(
          spec_of(Family::painleve_gullstrand, 1.0, rb, 1024));
      CHECK_FALSE(check_admissible_boundary(data).holds);
    }
    for (double rb : {2.2, 3.0, 4.0}) {
      auto data = build_initial_data(
          spec_of(Family::painleve_gullstrand, 1.0, rb, 1024));
      CHECK(check_admissible_boundary(data).holds);
    }
  }
  SUBCASE("flat ball is admissible") {
    auto data = build_initial_data(spec_of(Family::flat, 0.1, 3.0, 256));
    CHECK(check_admissible_boundary(data).holds);
  }
}

TEST_CASE("curvature profile closed forms") {
  SUBCASE("flat") {
    auto data = build_initial_data(spec_of(Family::flat, 0.1, 3.0, 256));
    auto c = curvature_profile(data.metric);
    CHECK(max_abs(c.K_rad) < 1e-10);
    CHECK(max_abs(c.K_tan) < 1e-10);
  }
  SUBCASE("Schwarzschild m=1") {
    auto data =
        build_initial_data(spec_of(Family::schwarzschild, 2.5, 4.5, 2048));
    auto c = curvature_profile(data.metric);
    const double dr = data.grid().spacing();
    for (std::size_t i = 10; i < c.R.size() - 10; i += 100) {
      const double r = data.grid().nodes[i];
      CHECK(std::abs(c.K_tan[i] - 2.0 / (r * r * r)) < 8 * dr * dr);
      CHECK(std::abs(c.K_rad[i] + 1.0 / (r * r * r)) < 8 * dr * dr);
    }
  }
  SUBCASE("round cylinder region") {
    ScenarioSpec s;
    s.family = Family::cylinder;
    s.r_min = 0.05;
    s.cyl_R = 1.0;
    s.cyl_L = 1.0;
    s.grid_count = 512;
    auto data = build_initial_data(s);
    auto c = curvature_profile(data.metric);
    // sample mid-plateau
    const std::size_t i = data.grid().locate(1.0);
    CHECK(c.K_tan[i] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(c.K_rad[i]) < 1e-8);
  }
  SUBCASE("consistency R = 2(2 K_rad + K_tan)") {
    auto data = build_initial_data(
        spec_of(Family::painleve_gullstrand, 1.0, 4.0, 512));
    auto c = curvature_profile(data.metric);
    for (std::size_t i = 0; i < c.R.size(); ++i)
      CHECK(c.R[i] ==
            doctest::Approx(2.0 * (2.0 * c.K_rad[i] + c.K_tan[i])));
  }
}
