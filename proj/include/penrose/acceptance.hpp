#pragma once

// Acceptance suite: ten end-to-end checks against closed-form oracles and
// structural invariants.  Each check prints one pass/fail line; the suite is
// shared between the `verify` CLI subcommand and the acceptance test binary.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "penrose/pipeline.hpp"

namespace penrose {

struct AcceptanceResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double ms = 0.0;
};

namespace acceptance_detail {

// All built-in scenarios run once through the full pipeline; the individual
// criteria read this shared cache.  Build wall-times are kept so the
// per-criterion runtime budgets can be enforced.
struct Ctx {
  std::map<std::string, RunReport> reports;
  std::map<std::string, double> build_ms;
};

inline const Ctx& ctx() {
  static const Ctx c = [] {
    Ctx out;
    for (const auto& s : builtin_scenarios()) {
      const auto t0 = std::chrono::steady_clock::now();
      out.reports.emplace(s.name, run_pipeline(s));
      const auto t1 = std::chrono::steady_clock::now();
      out.build_ms[s.name] =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    return out;
  }();
  return c;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Max-over-nodes Hawking-mass error against the mass parameter, computed
// directly from the node arrays (no per-node interpolant construction).
inline double hawking_sup_error(const SphericalInitialData& data, double m) {
  const auto H = detail::mean_curvature_nodes(data.metric);
  double err = 0.0;
  for (std::size_t i = 0; i < H.size(); ++i) {
    const double A = 4.0 * kPi * data.metric.rho[i] * data.metric.rho[i];
    const double mH =
        std::sqrt(A / (16.0 * kPi)) * (1.0 - A * H[i] * H[i] / (16.0 * kPi));
    err = std::max(err, std::abs(mH - m));
  }
  return err;
}

inline ScenarioSpec builtin(const std::string& name) {
  for (const auto& s : builtin_scenarios())
    if (s.name == name) return s;
  throw std::runtime_error("no builtin scenario " + name);
}

inline const CriterionVerdict* find_criterion(const RunReport& rep,
                                              CriterionKind k) {
  for (const auto& c : rep.criteria)
    if (c.criterion == k) return &c;
  return nullptr;
}

// 1. Hawking-mass constancy on the static spherical vacuum slice, plus
// measured convergence order on a chart with genuine stencil error.
inline AcceptanceResult c1_hawking_constancy() {
  AcceptanceResult r{1, "hawking_constancy"};
  const auto t0 = std::chrono::steady_clock::now();
  auto spec = builtin("schwarzschild_m1_rb4");
  spec.r_min = 2.0 + 1e-7;  // areal chart: a(r) diverges at r = 2m
  spec.grid_count = 8192;
  const double err = hawking_sup_error(build_initial_data(spec), 1.0);

  // the areal profile is linear, so the stencil is exact there; measure the
  // order on the curved isotropic profile instead
  auto iso = builtin("schwarzschild_isotropic_m1");
  auto iso_err = [&](std::size_t n) {
    auto s = iso;
    s.grid_count = n;
    return hawking_sup_error(build_initial_data(s), 1.0);
  };
  const double e1 = iso_err(512), e2 = iso_err(1024), e3 = iso_err(2048);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  r.pass = err < 1e-6 && o1 >= 1.9 && o2 >= 1.9 && ms < 1000.0;
  r.ms = ms;
  r.detail = "sup|m_H - m| = " + fmt(err) + ", orders " + fmt(o1) + "/" +
             fmt(o2) + ", " + fmt(ms) + " ms";
  return r;
}

// 2. Quasi-local Penrose inequality on the expanding slice containing a
// horizon: boundary mass, horizon irreducible mass, and margin.
inline AcceptanceResult c2_quasilocal_penrose() {
  AcceptanceResult r{2, "quasilocal_penrose"};
  const auto& rep = ctx().reports.at("pg_m1_rb4");
  const double ms = ctx().build_ms.at("pg_m1_rb4");
  if (rep.hard_failure || rep.observables.count("mots_area") == 0) {
    r.detail = "pipeline run incomplete";
    return r;
  }
  const double mLY = rep.observables.at("m_LY");
  const double irr =
      std::sqrt(rep.observables.at("mots_area") / (16.0 * kPi));
  const double margin = mLY - irr;
  r.pass = std::abs(mLY - 1.171573) <= 1e-4 && std::abs(irr - 1.0) <= 1e-4 &&
           margin >= 0.17 && ms < 10000.0;
  r.ms = ms;
  r.detail = "m_LY = " + fmt(mLY) + ", sqrt(A/16pi) = " + fmt(irr) +
             ", margin = " + fmt(margin) + ", " + fmt(ms) + " ms";
  return r;
}

// 3. Boundary mass dominates the Hawking mass of every enumerated sphere
// hull on every admissible built-in scenario.
inline AcceptanceResult c3_mass_chain_hulls() {
  AcceptanceResult r{3, "mass_chain_hulls"};
  double total_ms = 0.0;
  int checked = 0, violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [name, rep] : ctx().reports) {
    total_ms += ctx().build_ms.at(name);
    bool dec_ok = false;
    for (const auto& v : rep.verdicts)
      if (v.name == "dec") dec_ok = v.holds;
    if (!dec_ok) continue;  // inadmissible data are out of scope here
    if (rep.observables.count("m_LY") == 0 ||
        rep.observables.count("m_H_hull") == 0)
      continue;
    ++checked;
    const double slack =
        rep.observables.at("m_LY") - rep.observables.at("m_H_hull");
    worst = std::min(worst, slack);
    if (slack < -1e-4) ++violations;
  }
  r.pass = checked >= 5 && violations == 0 && total_ms < 60000.0;
  r.ms = total_ms;
  r.detail = std::to_string(checked) + " scenarios, worst slack " +
             fmt(worst) + ", " + fmt(total_ms) + " ms";
  return r;
}

// 4. Geroch monotonicity on every flow whose deformed composite metric has
// nonnegative scalar curvature; static-slice trace constant.
inline AcceptanceResult c4_geroch_monotonicity() {
  AcceptanceResult r{4, "geroch_monotonicity"};
  int gated = 0, failures = 0;
  for (const auto& [name, rep] : ctx().reports) {
    auto it = rep.observables.find("Rhat_min");
    if (it == rep.observables.end() || it->second < -1e-8) continue;
    for (const auto& v : rep.verdicts)
      if (v.name == "geroch_monotonicity") {
        ++gated;
        if (!v.holds) ++failures;
      }
  }
  const auto& schw = ctx().reports.at("schwarzschild_m1_rb4");
  double dev = 0.0;
  for (const auto& s : schw.flow.samples)
    dev = std::max(dev, std::abs(s.m_H - schw.flow.samples.front().m_H));
  r.pass = gated >= 5 && failures == 0 && dev < 1e-6 &&
           !schw.flow.samples.empty();
  r.detail = std::to_string(gated) + " gated flows, " +
             std::to_string(failures) + " failures, static trace dev " +
             fmt(dev);
  return r;
}

// 5. Conformal mass bookkeeping: tail fit vs volume integral of the
// asymptotic coefficient, the mass-shift identity, and the upper bound.
inline AcceptanceResult c5_conformal_bookkeeping() {
  AcceptanceResult r{5, "conformal_bookkeeping"};
  int checked = 0, bounded = 0;
  double worst_rel = 0.0, worst_id = 0.0;
  bool bounds_ok = true;
  for (const auto& [name, rep] : ctx().reports) {
    const auto& obs = rep.observables;
    if (obs.count("A_delta") == 0 || obs.count("A_delta_volume") == 0)
      continue;
    ++checked;
    const double tail = obs.at("A_delta"), vol = obs.at("A_delta_volume");
    const double scale = std::max({std::abs(tail), std::abs(vol), 1e-8});
    worst_rel = std::max(worst_rel, std::abs(tail - vol) / scale);
    const double ghat = obs.at("m_adm_ghat"), gplus = obs.at("m_ext");
    worst_id = std::max(worst_id, std::abs(ghat - (gplus + 2.0 * tail)));
    // the upper bound is a consequence of the admissibility norms; it is
    // only promised where the corner 1-form passes that audit
    bool admissible = false;
    for (const auto& v : rep.verdicts)
      if (v.name == "jang_admissible_X") {
        const bool a1 =
            v.values.count("A1_ok") == 1 && v.values.at("A1_ok") == 1.0;
        // a vanishing corner 1-form needs no norm bounds: the inequality
        // degenerates to the plain extension mass bound
        const bool trivial = v.values.at("L1") < 1e-10 &&
                             std::abs(obs.at("x_nu_integral")) < 1e-10;
        admissible = (v.holds && a1) || trivial;
      }
    if (!admissible) continue;
    ++bounded;
    if (ghat > gplus + obs.at("x_nu_integral") / (8.0 * kPi) + 1e-4)
      bounds_ok = false;
  }
  r.pass = checked >= 5 && worst_rel <= 1e-4 && worst_id <= 1e-4 && bounds_ok;
  r.detail = std::to_string(checked) + " scenarios, tail/volume rel " +
             fmt(worst_rel) + ", identity dev " + fmt(worst_id) + ", " +
             std::to_string(bounded) + " bounded" +
             (bounds_ok ? "" : ", upper bound violated");
  return r;
}

// 6. Corner-smoothing scaling: the cutoff divergence obeys the delta^{-1/3}
// law across two decades, and the negative curvature excess stays in the tube.
inline AcceptanceResult c6_smoothing_scaling() {
  AcceptanceResult r{6, "smoothing_scaling"};
  auto spec = builtin("pg_m1_annulus_3_4");
  auto data = build_initial_data(spec);
  auto sol = solve_jang_dirichlet(data, {});
  auto graph = assemble_jang_graph(data, sol);
  auto ext = shi_tam_round_extension(
      graph.metric.rho.back() * graph.metric.rho.back() * 4.0 * kPi,
      boundary_mean_curvature(graph));
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool confined = true;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    auto glued = smooth_corner(graph, ext, delta);
    double sup_div = 0.0;
    for (double d : glued.tube_divX) sup_div = std::max(sup_div, std::abs(d));
    const double scaled = sup_div * std::cbrt(delta);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
    // past the tube the extension side is exactly scalar-flat
    for (std::size_t i = 0; i < glued.metric.grid.count(); ++i) {
      const double s = glued.metric.grid.nodes[i] - glued.corner_s;
      if (s > delta && glued.K_delta_minus[i] > 1e-6) confined = false;
    }
  }
  r.pass = hi <= 2.0 * lo && confined;
  r.detail = "scaled sup range [" + fmt(lo) + ", " + fmt(hi) + "]" +
             (confined ? ", excess confined" : ", excess escapes tube");
  return r;
}

// 7. Graph-equation solver: exact zero on time-symmetric data, blow-up
// located at the horizon, and second-order interior convergence.
inline AcceptanceResult c7_jang_solver() {
  AcceptanceResult r{7, "jang_solver"};
  auto ts = build_initial_data(builtin("schwarzschild_m1_rb4"));
  auto ts_sol = solve_jang_dirichlet(ts, {});
  double f_sup = 0.0;
  for (double f : ts_sol.f) f_sup = std::max(f_sup, std::abs(f));
  const bool ts_ok = f_sup < 1e-12 && ts_sol.residual_sup < 1e-12;

  const auto& pg = ctx().reports.at("pg_m1_rb4");
  const bool blow_ok =
      pg.observables.count("blowup_radius") == 1 &&
      std::abs(pg.observables.at("blowup_radius") - 2.0) <= 1e-2;

  // annulus: residual floor and self-convergence against a fine reference
  auto ann = builtin("pg_m1_annulus_3_4");
  auto at = [&](std::size_t n) {
    auto s = ann;
    s.grid_count = n;
    auto d = build_initial_data(s);
    return std::pair{d, solve_jang_dirichlet(d, {})};
  };
  auto [dref, ref] = at(2048);
  CubicInterpolant f_ref(dref.grid().nodes, ref.f);
  auto err_at = [&](std::size_t n) {
    auto [d, s] = at(n);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      e = std::max(e, std::abs(s.f[i] - f_ref(d.grid().nodes[i])));
    return e;
  };
  const double e1 = err_at(128), e2 = err_at(256), e3 = err_at(512);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  const bool ann_ok = ref.residual_sup < 1e-8 && o1 >= 1.9 && o2 >= 1.9;

  r.pass = ts_ok && blow_ok && ann_ok;
  r.detail = "static sup|f| = " + fmt(f_sup) + ", blow-up at " +
             (pg.observables.count("blowup_radius")
                  ? fmt(pg.observables.at("blowup_radius"))
                  : std::string("none")) +
             ", annulus orders " + fmt(o1) + "/" + fmt(o2);
  return r;
}

// 8. Nonexistence conclusions never contradict a directly found MOTS; flat
// and far-annulus scenarios conclude nonexistence as required.
inline AcceptanceResult c8_nonexistence_consistency() {
  AcceptanceResult r{8, "nonexistence_consistency"};
  bool consistent = true;
  for (const auto& [name, rep] : ctx().reports) {
    if (rep.hard_failure) consistent = false;
    bool not_exists = false;
    for (const auto& c : rep.criteria)
      if (c.conclusion == Conclusion::not_exists) not_exists = true;
    if (not_exists && rep.observables.count("mots_radius") == 1)
      consistent = false;
  }
  const auto* flat17 =
      find_criterion(ctx().reports.at("flat_rb3"), CriterionKind::prop17);
  const bool flat_ok = flat17 &&
                       flat17->conclusion == Conclusion::not_exists &&
                       flat17->values.count("C") == 1 &&
                       flat17->values.at("C") == 0.0;
  const auto* far17 = find_criterion(
      ctx().reports.at("schwarzschild_m0p01_annulus_3_4"),
      CriterionKind::prop17);
  const bool far_ok = far17 && far17->conclusion == Conclusion::not_exists;
  r.pass = consistent && flat_ok && far_ok;
  r.detail = std::string(consistent ? "no contradictions" : "contradiction") +
             (flat_ok ? ", flat excluded" : ", flat check failed") +
             (far_ok ? ", small-mass annulus excluded"
                     : ", small-mass annulus check failed");
  return r;
}

// 9. Surface-of-revolution embeddings: metric round-trip residual and total
// Gauss curvature on every built-in boundary at 512 polar nodes.
inline AcceptanceResult c9_embedding_quality() {
  AcceptanceResult r{9, "embedding_quality"};
  double worst_resid = 0.0, worst_defect = 0.0;
  int checked = 0;
  for (const auto& s : builtin_scenarios()) {
    auto data = build_initial_data(s);
    auto b = boundary_surface(data);
    const double rb2 = b.rho_b * b.rho_b;
    auto emb = embed_surface_of_revolution(
        [rb2](double) { return rb2; },
        [rb2](double th) {
          const double sn = std::sin(th);
          return rb2 * sn * sn;
        },
        512);
    worst_resid = std::max(worst_resid, emb.metric_residual);
    worst_defect = std::max(worst_defect, emb.gauss_defect);
    ++checked;
  }
  r.pass = checked >= 8 && worst_resid < 1e-6 && worst_defect < 1e-6;
  r.detail = std::to_string(checked) + " boundaries, residual " +
             fmt(worst_resid) + ", Gauss defect " + fmt(worst_defect);
  return r;
}

// 10. Wang-Yau energy at the time-symmetric observer reproduces the Liu-Yau
// mass exactly, and the family minimum never exceeds it.
inline AcceptanceResult c10_wang_yau_reduction() {
  AcceptanceResult r{10, "wang_yau_reduction"};
  double worst = 0.0;
  int checked = 0;
  for (const auto& [name, rep] : ctx().reports) {
    const auto& obs = rep.observables;
    if (obs.count("m_WY_tau0") == 0 || obs.count("m_LY") == 0) continue;
    ++checked;
    worst = std::max(worst, std::abs(obs.at("m_WY_tau0") - obs.at("m_LY")));
  }
  auto b = boundary_surface(build_initial_data(builtin("schwarzschild_m1_rb4")));
  b.theta_count = 256;
  TauFamilySpec fam;
  fam.degree = 2;
  fam.coeff_bound = 0.1;
  fam.scan_points = 5;
  const auto best = wang_yau_mass_over_family(b, fam);
  const double e0 = liu_yau_mass(b).value;
  const bool family_ok = best.energy.value <= e0 + 1e-9;
  r.pass = checked >= 5 && worst <= 1e-10 && family_ok;
  r.detail = std::to_string(checked) + " scenarios, worst |E_WY - m_LY| = " +
             fmt(worst) +
             (family_ok ? ", family minimum at tau = 0"
                        : ", family minimum above tau = 0");
  return r;
}

}  // namespace acceptance_detail

inline std::vector<AcceptanceResult> run_acceptance() {
  using namespace acceptance_detail;
  std::vector<AcceptanceResult (*)()> checks = {
      c1_hawking_constancy,      c2_quasilocal_penrose,
      c3_mass_chain_hulls,       c4_geroch_monotonicity,
      c5_conformal_bookkeeping,  c6_smoothing_scaling,
      c7_jang_solver,            c8_nonexistence_consistency,
      c9_embedding_quality,      c10_wang_yau_reduction};
  std::vector<AcceptanceResult> out;
  for (auto* fn : checks) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      AcceptanceResult r;
      r.index = static_cast<int>(out.size()) + 1;
      r.name = "criterion_" + std::to_string(r.index);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
      out.push_back(r);
    }
  }
  return out;
}

// Prints one line per criterion; returns the number of failures.
inline int print_acceptance(std::ostream& os) {
  int failures = 0;
  for (const auto& r : run_acceptance()) {
    os << (r.pass ? "PASS" : "FAIL") << "  " << r.index << ". " << r.name;
    if (!r.detail.empty()) os << "  [" << r.detail << "]";
    os << "\n";
    if (!r.pass) ++failures;
  }
  return failures;
}

}  // namespace penrose
