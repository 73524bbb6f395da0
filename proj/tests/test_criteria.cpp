#include <doctest.h>

#include <cmath>

#include "penrose/criteria.hpp"
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

JangGraph graph_of(const SphericalInitialData& data) {
  return assemble_jang_graph(data, solve_jang_dirichlet(data, {}));
}

// uniformly expanding flat slice: k = kappa0 * g, so mu = 3 kappa0^2 / (8 pi)
// and J = 0; theta_plus = 2/r - 2 kappa0 vanishes at r = 1/kappa0
SphericalInitialData expanding_slice(double kappa0, double r_min, double r_b,
                                     std::size_t n) {
  SphericalInitialData d;
  d.metric.grid = RadialGrid::uniform(r_min, r_b, n);
  d.metric.a.assign(n, 1.0);
  d.metric.rho = d.metric.grid.nodes;
  d.k_rr.assign(n, kappa0);
  d.k_t.assign(n, kappa0);
  return d;
}

}  // namespace

TEST_CASE("minimal-surface area coefficient") {
  // flat limit: integral r^2 / 2
  auto flat = meeks_yau_alpha(1.0, 0.0, 1.0, 10.0);
  CHECK(flat.integral == doctest::Approx(0.5));
  CHECK(flat.alpha == doctest::Approx(std::sqrt(0.05)));

  // small curvature: series of (gamma + ln z - Ci(z)) / 2 at z = 2 K r
  auto small = meeks_yau_alpha(1.0, 0.01, 1.0, 10.0);
  CHECK(small.integral == doctest::Approx(0.49917).epsilon(1e-4));
  CHECK(small.integral < flat.integral);

  // clamp at one
  CHECK(meeks_yau_alpha(1e9, 0.0, 1.0, 1.0).alpha == 1.0);

  CHECK_THROWS_AS(meeks_yau_alpha(1.0, 0.0, 0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(meeks_yau_alpha(1.0, 0.0, 1.0, 0.0), PreconditionError);
}

TEST_CASE("quasi-local detection mass over sphere hulls") {
  auto flat = build_initial_data(spec_of(Family::flat, 0.05, 2.0, 1024));
  SubdomainPair whole{0.05, 2.0, 0.05, 2.0};
  auto st0 = shi_tam_mass(flat.metric, {whole});
  CHECK(st0.mass.value == 0.0);
  CHECK(st0.coeff.alpha > 0.0);
  CHECK(st0.coeff.alpha <= 1.0);

  auto sch =
      build_initial_data(spec_of(Family::schwarzschild, 2.25, 4.0, 2048));
  SubdomainPair pr{2.25, 2.5, 2.25, 3.5};
  auto st = shi_tam_mass(sch.metric, {pr});
  // every centered sphere has Hawking mass equal to the mass parameter
  CHECK(st.best_mH == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(st.mass.value > 0.0);
  CHECK(st.mass.value <= 1.0);
  // curvature bound over Omega_2 is the tangential sectional max 2m/rho^3
  CHECK(st.coeff.K_bound ==
        doctest::Approx(2.0 / (2.25 * 2.25 * 2.25)).epsilon(2e-2));

  // profile with only negative Hawking masses floors at zero
  RadialMetric toy;
  toy.grid = RadialGrid::uniform(0.5, 2.0, 512);
  toy.a.assign(512, 1.0);
  toy.rho.resize(512);
  for (std::size_t i = 0; i < 512; ++i) toy.rho[i] = 1.2 * toy.grid.nodes[i];
  SubdomainPair tp{0.5, 2.0, 0.5, 2.0};
  auto stn = shi_tam_mass(toy, {tp});
  CHECK(stn.mass.value == 0.0);
  CHECK(stn.best_mH == 0.0);

  SubdomainPair bad{1.0, 0.5, 0.5, 2.0};
  CHECK_THROWS_AS(shi_tam_mass(toy, {bad}), PreconditionError);
}

TEST_CASE("graph detection mass and the Rad ratio") {
  auto flat = build_initial_data(spec_of(Family::flat, 0.05, 2.0, 1024));
  auto gf = graph_of(flat);
  auto msf = m_star(flat, gf);
  CHECK(msf.st.mass.value == 0.0);
  CHECK(msf.beta == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(msf.rad_data.classification == "ball_like");
  CHECK(msf.rad_graph.classification == "ball_like");

  auto sch =
      build_initial_data(spec_of(Family::schwarzschild, 2.25, 4.0, 2048));
  auto gs = graph_of(sch);
  auto mss = m_star(sch, gs);
  // time-symmetric data: the graph is the slice itself
  CHECK(mss.beta == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mss.st.best_mH == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(mss.st.mass.value > 0.0);
  CHECK(mss.st.mass.value <= 1.0);
  // the boundary-touching family is a subset of the full hull family
  SubdomainPair whole{gs.metric.grid.r_min(), gs.metric.grid.r_max(),
                      gs.metric.grid.r_min(), gs.metric.grid.r_max()};
  auto st_full = shi_tam_mass(gs.metric, {whole});
  CHECK(mss.st.mass.value <= st_full.mass.value + 1e-12);
}

TEST_CASE("graph detection mass across a blow-up") {
  auto data = build_initial_data(
      spec_of(Family::painleve_gullstrand, 0.05, 4.0, 2048));
  auto sol = solve_jang_dirichlet(data, {});
  REQUIRE(sol.blowup.has_value());
  CHECK(sol.blowup->radius == doctest::Approx(2.0).epsilon(2e-2));
  // full-domain assembly is refused
  CHECK_THROWS_AS(assemble_jang_graph(data, sol), std::domain_error);

  // keep the near-cylinder throat (area radius within 5% of the detected
  // cylinder) but drop the diverging funnel below it
  const double r_in = 0.95 * sol.blowup->radius;
  auto graph = assemble_jang_graph(data, sol, r_in);
  auto ms = m_star(data, graph);
  // the throat shows up as a long constant-radius tube in proper distance
  CHECK(ms.rad_graph.classification == "cylinder_capped");
  CHECK(ms.rad_graph.plateau_R == doctest::Approx(2.0).epsilon(0.1));
  CHECK(ms.rad_graph.value == doctest::Approx(kPi).epsilon(0.1));
  CHECK(ms.rad_data.classification == "ball_like");
  CHECK(ms.beta > 1.0);
  CHECK(ms.st.mass.value >= 0.0);
  CHECK(std::isfinite(ms.st.mass.value));
}

TEST_CASE("hoop-type existence test") {
  auto flat = build_initial_data(spec_of(Family::flat, 0.05, 2.0, 1024));
  auto gf = graph_of(flat);
  auto vf = evaluate_thm14(flat, gf);
  REQUIRE(vf.size() == 2);
  for (const auto& v : vf) {
    CHECK_FALSE(v.holds);
    CHECK(v.conclusion == Conclusion::inconclusive);
    CHECK(v.values.at("mots_found") == 0.0);
    CHECK(v.values.at("agreement") == 1.0);
  }

  auto sch =
      build_initial_data(spec_of(Family::schwarzschild, 2.25, 4.0, 2048));
  auto gs = graph_of(sch);
  auto vs = evaluate_thm14(sch, gs);
  for (const auto& v : vs) {
    CHECK(v.conclusion != Conclusion::not_exists);
    CHECK(v.values.at("agreement") == 1.0);
    CHECK(v.values.at("liu_yau") ==
          doctest::Approx(1.1715728752538097).epsilon(1e-3));
    CHECK(v.values.at("diameter") == doctest::Approx(8.0));
  }

  // expanding slice with a horizon inside: the direct finder sees it and the
  // agreement field stays consistent whatever the criterion concludes
  auto pg = build_initial_data(
      spec_of(Family::painleve_gullstrand, 0.05, 4.0, 2048));
  auto sol = solve_jang_dirichlet(pg, {});
  REQUIRE(sol.blowup.has_value());
  auto gp = assemble_jang_graph(pg, sol, 0.95 * sol.blowup->radius);
  auto vp = evaluate_thm14(pg, gp);
  for (const auto& v : vp) {
    CHECK(v.values.at("mots_found") == 1.0);
    CHECK(v.values.at("mots_radius") == doctest::Approx(2.0).epsilon(1e-2));
    CHECK(v.values.at("agreement") == 1.0);
    CHECK(v.values.at("beta") > 1.0);
  }
}

TEST_CASE("isoperimetric dichotomy and detection-mass test") {
  auto flat = build_initial_data(spec_of(Family::flat, 0.05, 2.0, 1024));
  auto gf = graph_of(flat);
  auto vf = evaluate_prop15_16(flat, gf);
  REQUIRE(vf.size() == 3);
  for (const auto& v : vf) {
    CHECK(v.conclusion == Conclusion::inconclusive);
    CHECK(v.values.at("minimal_found") == 0.0);
  }

  // supplied candidate on a slice containing its horizon: the hull Hawking
  // mass reproduces the mass parameter but stays below the boundary mass
  auto iso = build_initial_data(
      spec_of(Family::schwarzschild_isotropic, 0.5, 3.0, 2048));
  auto gi = graph_of(iso);
  auto vi = evaluate_prop15_16(iso, gi, 0.6);
  CHECK(vi[0].lhs == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(vi[0].rhs > vi[0].lhs);
  CHECK(vi[0].conclusion == Conclusion::inconclusive);

  // dumbbell: the area-volume scan lands on the neck found by the direct
  // minimal-sphere search, and the first branch fires
  auto db = build_initial_data(spec_of(Family::dumbbell, 0.05, 4.0, 2048));
  auto gd = graph_of(db);
  auto vd = evaluate_prop15_16(db, gd);
  CHECK(vd[0].values.at("minimal_found") == 1.0);
  CHECK(vd[0].values.at("iso_ratio") < 1.0 - 1e-3);
  CHECK(std::abs(vd[0].values.at("iso_scan_radius") -
                 vd[0].values.at("minimal_radius")) < 0.1);
  CHECK(vd[0].conclusion == Conclusion::exists);
  for (const auto& v : vd) CHECK(v.values.at("agreement") == 1.0);
}

TEST_CASE("curvature-based nonexistence test") {
  auto flat = build_initial_data(spec_of(Family::flat, 0.05, 2.0, 1024));
  auto gf = graph_of(flat);
  auto vf = evaluate_prop17(flat, gf);
  CHECK(vf.values.at("C") == doctest::Approx(0.0));
  CHECK(vf.holds);
  CHECK(vf.conclusion == Conclusion::not_exists);

  // horizon-containing slice: C = 1/2 from the tangential curvature at the
  // throat, threshold 1, boundary mass above it: criterion not triggered
  auto iso = build_initial_data(
      spec_of(Family::schwarzschild_isotropic, 0.5, 3.0, 2048));
  auto gi = graph_of(iso);
  auto vi = evaluate_prop17(iso, gi);
  CHECK(vi.values.at("C") == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(vi.lhs > vi.rhs);
  CHECK(vi.conclusion == Conclusion::inconclusive);

  // small mass far from the horizon: boundary mass below the threshold
  auto sm = build_initial_data(
      spec_of(Family::schwarzschild, 3.0, 4.0, 1024, 0.01));
  auto gsm = graph_of(sm);
  auto vsm = evaluate_prop17(sm, gsm);
  CHECK(vsm.conclusion == Conclusion::not_exists);
  CHECK(vsm.values.at("minimal_found") == 0.0);
  // the closed-form boundary-mass identity makes the tau = 0 energy agree
  auto vwy = evaluate_prop17(sm, gsm, MassKind::wang_yau_energy);
  CHECK(vwy.lhs == doctest::Approx(vsm.lhs).epsilon(1e-9));
  CHECK(vwy.conclusion == Conclusion::not_exists);

  // a nonexistence verdict contradicted by a located horizon is a defect
  auto pg = build_initial_data(
      spec_of(Family::painleve_gullstrand, 0.05, 4.0, 1024));
  CHECK_THROWS_AS(evaluate_prop17(pg, gf), SolverError);
}

TEST_CASE("pointwise energy-size criterion") {
  // vacuum: no energy margin
  auto sch =
      build_initial_data(spec_of(Family::schwarzschild, 2.25, 4.0, 2048));
  auto vs = schoen_yau_criterion(sch);
  CHECK(vs.conclusion == Conclusion::inconclusive);

  // sub-threshold star: positive margin but far too small for its size
  auto star = build_initial_data(
      spec_of(Family::constant_density_star, 0.05, 4.0, 1024));
  auto vst = schoen_yau_criterion(star);
  CHECK(vst.values.at("lambda") > 0.0);
  CHECK(vst.lhs < vst.rhs);
  CHECK(vst.conclusion == Conclusion::inconclusive);

  // uniformly expanding slice above threshold: criterion fires and the
  // direct finder confirms the horizon at r = 1/kappa0
  auto hot = expanding_slice(6.0, 0.05, 4.0, 2048);
  auto vh = schoen_yau_criterion(hot);
  CHECK(vh.values.at("lambda") ==
        doctest::Approx(3.0 * 36.0 / (8.0 * kPi)).epsilon(1e-9));
  CHECK(vh.holds);
  CHECK(vh.conclusion == Conclusion::exists);
  CHECK(vh.values.at("mots_found") == 1.0);
  CHECK(vh.values.at("mots_radius") == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
  CHECK(vh.values.at("agreement") == 1.0);

  // below threshold the criterion stays silent even though a horizon exists
  auto warm = expanding_slice(4.0, 0.05, 4.0, 2048);
  auto vw = schoen_yau_criterion(warm);
  CHECK(vw.conclusion == Conclusion::inconclusive);
  CHECK(vw.values.at("mots_found") == 1.0);
  CHECK(vw.values.at("agreement") == 1.0);
}
