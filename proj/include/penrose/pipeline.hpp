#ifndef PENROSE_PIPELINE_HPP_
#define PENROSE_PIPELINE_HPP_

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "penrose/config.hpp"
#include "penrose/criteria.hpp"
#include "penrose/glue.hpp"
#include "penrose/hulls.hpp"
#include "penrose/imcf.hpp"
#include "penrose/initial_data.hpp"
#include "penrose/jang.hpp"
#include "penrose/quasilocal.hpp"
#include "penrose/report.hpp"
#include "penrose/scenario.hpp"

namespace penrose {

struct StageResult {
  std::string name;
  std::string status = "ok";  // ok | failed | skipped
  std::string error;
  double ms = 0.0;  // wall time; excluded from serialized reports
};

struct RunReport {
  std::string schema_version = "penrose-lab-report-1";
  ScenarioSpec spec;
  std::vector<StageResult> stages;
  std::vector<VerdictReport> verdicts;
  std::vector<CriterionVerdict> criteria;
  std::map<std::string, double> observables;
  std::vector<std::string> notes;
  FlowTrace flow;
  std::vector<double> profile_r, profile_rho, profile_a;
  bool hard_failure = false;
};

namespace detail {

template <class F>
bool run_stage(RunReport& rep, const char* name, bool enabled, bool deps_ok,
               F&& body) {
  StageResult st;
  st.name = name;
  if (!enabled || !deps_ok) {
    st.status = "skipped";
    st.error = enabled ? "upstream stage unavailable" : "disabled by toggle";
    rep.stages.push_back(st);
    return false;
  }
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    st.status = "failed";
    st.error = e.what();
    rep.hard_failure = true;
  }
  st.ms = std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - t0)
              .count();
  rep.stages.push_back(st);
  return st.status == "ok";
}

}  // namespace detail

// Full scenario pipeline: constraints -> Jang -> masses -> hulls/MOTS ->
// IMCF -> extension/smoothing/conformal -> criteria.  Criterion failures are
// verdicts, not errors; stage hard-failures mark downstream stages skipped.
inline RunReport run_pipeline(const ScenarioSpec& spec) {
  RunReport rep;
  rep.spec = spec;
  auto data = build_initial_data(spec);
  rep.profile_r = data.grid().nodes;
  rep.profile_rho = data.metric.rho;
  rep.profile_a = data.metric.a;

  bool dec_ok = false;
  detail::run_stage(rep, "constraints", true, true, [&] {
    const auto em = compute_constraints(data);
    const double dec_tol = std::max(
        spec.tol.dec, spec.tol.discretization(data.grid().spacing()));
    auto dec = check_dec(em, data, dec_tol);
    dec_ok = dec.holds;
    rep.verdicts.push_back(dec);
    rep.verdicts.push_back(check_admissible_boundary(data, spec.tol));
    double mu_min = std::numeric_limits<double>::infinity();
    for (double m : em.mu) mu_min = std::min(mu_min, m);
    rep.observables["mu_min"] = mu_min;
  });

  std::optional<JangSolution> sol;
  std::optional<JangGraph> graph;       // throat-preserving graph
  std::optional<JangGraph> graph_mild;  // moderate-gradient graph for gluing
  bool jang_ok = detail::run_stage(rep, "jang", spec.toggles.jang, true, [&] {
    JangOptions jo;
    jo.tau_b = spec.tau_b;
    if (spec.jang_eps_min > 0.0) jo.eps_min = spec.jang_eps_min;
    sol = solve_jang_dirichlet(data, jo);
    rep.observables["jang_residual"] = sol->residual_sup;
    if (sol->blowup) {
      rep.observables["blowup_radius"] = sol->blowup->radius;
      // keep the near-cylinder throat for geometry, and a separate
      // moderate-gradient restriction for the gluing stage
      graph = assemble_jang_graph(data, *sol, 0.95 * sol->blowup->radius);
      const auto f_p = fd::derivative(data.grid().nodes, sol->f);
      double r_mild = sol->blowup->radius;
      for (std::size_t i = data.grid().count(); i-- > 0;) {
        if (std::abs(f_p[i]) * std::sqrt(data.metric.a[i]) > 30.0) {
          if (i + 1 < data.grid().count()) r_mild = data.grid().nodes[i + 1];
          break;
        }
      }
      graph_mild = assemble_jang_graph(data, *sol, r_mild);
    } else {
      graph = assemble_jang_graph(data, *sol);
      graph_mild = graph;
    }
    const auto audit = audit_admissible_X(*graph_mild, spec.audit);
    rep.observables["divX_L1"] = audit.L1;
    rep.observables["divX_L32"] = audit.L32;
    rep.observables["divX_L65"] = audit.L65;
    rep.observables["x_nu_integral"] = audit.x_nu_integral;
    VerdictReport adm("jang_admissible_X",
                      audit.norms_ok && audit.x_nu_positive, audit.L32,
                      spec.audit.d2, 0.0);
    adm.values["L1"] = audit.L1;
    adm.values["L65"] = audit.L65;
    adm.values["x_nu_positive"] = audit.x_nu_positive ? 1.0 : 0.0;
    adm.values["in3_ok"] = audit.in3_ok ? 1.0 : 0.0;
    adm.values["A1_ok"] = audit.A1_ok ? 1.0 : 0.0;
    rep.verdicts.push_back(adm);
  });

  double m_LY = 0.0, m_WY0 = 0.0;
  bool masses_ok =
      detail::run_stage(rep, "masses", spec.toggles.masses, true, [&] {
        const auto b = boundary_surface(data);
        m_LY = liu_yau_mass(b).value;
        m_WY0 = wang_yau_energy(b, [](double) { return 0.0; }).value;
        const auto s = sphere_geometry(data, data.grid().r_max());
        rep.observables["m_LY"] = m_LY;
        rep.observables["m_WY_tau0"] = m_WY0;
        rep.observables["m_H_boundary"] = hawking_mass(s.area, s.H).value;
        rep.observables["boundary_area"] = s.area;
      });

  std::optional<MotsRecord> mots;
  double m_H_hull = 0.0;
  bool hulls_ok =
      detail::run_stage(rep, "hulls", spec.toggles.hulls, true, [&] {
        mots = find_outermost_mots(data, spec.tol);
        if (mots) {
          rep.observables["mots_radius"] = mots->radius;
          const auto sg = sphere_geometry(data, mots->radius);
          rep.observables["mots_area"] = sg.area;
          if (masses_ok) {
            // quasi-local horizon bound: boundary mass dominates the
            // irreducible mass of the outermost marginal sphere
            VerdictReport pen("penrose_quasilocal",
                              m_LY >= std::sqrt(sg.area / (16.0 * kPi)) - 1e-4,
                              m_LY, std::sqrt(sg.area / (16.0 * kPi)), 1e-4);
            pen.values["mots_area"] = sg.area;
            rep.verdicts.push_back(pen);
          }
        }
        const RadialMetric& hm = graph ? graph->metric : data.metric;
        if (auto ms = find_outermost_minimal(hm, spec.tol))
          rep.observables["minimal_radius"] = ms->radius;
        const auto H = detail::mean_curvature_nodes(hm);
        double best_r = 0.0;
        detail::best_hawking_sphere(hm, H, hm.grid.r_min(), hm.grid.r_max(),
                                    hm.grid.r_max(), spec.tol, false,
                                    &m_H_hull, &best_r);
        rep.observables["m_H_hull"] = m_H_hull;
        rep.observables["m_H_hull_radius"] = best_r;
        try {
          const auto rr = rad(detail::resample_proper_distance(
              graph ? graph->metric : data.metric));
          rep.observables["rad"] = rr.value;
        } catch (const UnsupportedGeometryError& e) {
          rep.notes.push_back(std::string("rad: ") + e.what());
        }
      });

  detail::run_stage(rep, "imcf", spec.toggles.imcf, true, [&] {
    const RadialMetric& fm = graph ? graph->metric : data.metric;
    const auto& g = fm.grid;
    const double r0 = g.nodes[std::max<std::size_t>(1, g.count() / 64)];
    const double A0 = 4.0 * kPi * fm.rho[std::max<std::size_t>(
                                       1, g.count() / 64)] *
                      fm.rho[std::max<std::size_t>(1, g.count() / 64)];
    const double A1 = 4.0 * kPi * fm.rho.back() * fm.rho.back();
    const double t_max = 0.98 * std::log(A1 / A0);
    if (!(t_max > 0.0)) throw PreconditionError("imcf: empty flow window");
    rep.flow = run_weak_imcf(fm, r0, t_max);
    double floor = 0.0;
    const auto curv = curvature_profile(fm);
    for (double R : curv.R) floor = std::min(floor, R);
    auto ger = check_geroch(rep.flow, floor);
    rep.verdicts.push_back(ger);
    if (!rep.flow.samples.empty()) {
      rep.observables["flow_mH_first"] = rep.flow.samples.front().m_H;
      rep.observables["flow_mH_last"] = rep.flow.samples.back().m_H;
    }
  });

  std::optional<ConformalSolution> conf;
  double m_ext = 0.0, x_nu = 0.0;
  bool glue_ok = detail::run_stage(
      rep, "glue", spec.toggles.glue, jang_ok && graph_mild.has_value(), [&] {
        const auto& gg = *graph_mild;
        const double Hbar = boundary_mean_curvature(gg);
        const double A_b = 4.0 * kPi * gg.metric.rho.back() *
                           gg.metric.rho.back();
        auto ext = shi_tam_round_extension(A_b, Hbar);
        m_ext = ext.m_ext;
        rep.observables["m_ext"] = m_ext;
        rep.verdicts.push_back(ext.eq_check);
        auto glued = smooth_corner(gg, ext, spec.audit.delta, spec.tol);
        x_nu = glued.x_nu_integral;
        rep.observables["C1_measured"] = glued.C1_measured;
        AuditConfig cfg = spec.audit;
        cfg.c1 = glued.C1_measured;
        conf = solve_conformal(glued, 0.8 * ext.rho_b, cfg, spec.tol);
        rep.observables["A_delta"] = conf->A_delta_tail;
        rep.observables["A_delta_volume"] = conf->A_delta_volume;
        rep.observables["Rhat_min"] = conf->Rhat_min;
        rep.observables["m_adm_ghat"] = conf->m_adm_ghat;
        rep.observables["L6_norm_w"] = conf->L6_norm_w;
        rep.observables["L6_bound"] = conf->L6_bound;
      });

  detail::run_stage(rep, "mass_chain", spec.toggles.glue,
                    glue_ok && masses_ok && hulls_ok, [&] {
                      MassChainArtifacts art;
                      art.m_LY = m_LY;
                      art.m_WY = m_WY0;
                      art.m_H_hull = m_H_hull;
                      art.m_adm_gplus = m_ext;
                      art.A_delta = conf->A_delta_tail;
                      art.x_nu_integral = x_nu;
                      art.m_adm_ghat = conf->m_adm_ghat;
                      rep.verdicts.push_back(verify_mass_chain(art));
                    });

  detail::run_stage(
      rep, "criteria", spec.toggles.criteria, jang_ok && graph.has_value(),
      [&] {
        auto guarded = [&](const char* what, auto&& fn) {
          try {
            fn();
          } catch (const UnsupportedGeometryError& e) {
            rep.notes.push_back(std::string(what) + ": " + e.what());
          }
        };
        guarded("hoop criterion", [&] {
          for (auto& v : evaluate_thm14(data, *graph, 1.0, spec.tol))
            rep.criteria.push_back(std::move(v));
        });
        guarded("isoperimetric criteria", [&] {
          for (auto& v :
               evaluate_prop15_16(data, *graph, std::nullopt, 1.0, spec.tol))
            rep.criteria.push_back(std::move(v));
        });
        if (dec_ok) {
          guarded("curvature criterion", [&] {
            rep.criteria.push_back(
                evaluate_prop17(data, *graph, MassKind::liu_yau, spec.tol));
          });
        } else {
          CriterionVerdict v;
          v.criterion = CriterionKind::prop17;
          v.conclusion = Conclusion::inconclusive;
          v.detail = "energy condition unverified; nonexistence not applied";
          rep.criteria.push_back(std::move(v));
        }
        guarded("pointwise criterion", [&] {
          rep.criteria.push_back(schoen_yau_criterion(data, spec.tol));
        });
      });

  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline nlohmann::ordered_json verdict_json(const VerdictReport& v) {
  nlohmann::ordered_json j;
  j["name"] = v.name;
  j["holds"] = v.holds;
  j["lhs"] = v.lhs;
  j["rhs"] = v.rhs;
  j["tolerance"] = v.tolerance;
  if (!v.detail.empty()) j["detail"] = v.detail;
  j["values"] = v.values;
  return j;
}

inline nlohmann::ordered_json criterion_json(const CriterionVerdict& v) {
  nlohmann::ordered_json j;
  j["criterion"] = criterion_name(v.criterion);
  j["holds"] = v.holds;
  j["lhs"] = v.lhs;
  j["rhs"] = v.rhs;
  j["conclusion"] = conclusion_name(v.conclusion);
  if (!v.detail.empty()) j["detail"] = v.detail;
  j["values"] = v.values;
  return j;
}

}  // namespace detail

// Deterministic structured report: identical spec => byte-identical output.
// Wall-time stage timings are deliberately not serialized.
inline nlohmann::ordered_json report_json(const RunReport& rep) {
  nlohmann::ordered_json j;
  j["schema_version"] = rep.schema_version;
  auto& sc = j["scenario"];
  sc["name"] = rep.spec.name;
  sc["family"] = family_name(rep.spec.family);
  sc["m"] = rep.spec.m;
  sc["rho0"] = rep.spec.rho0;
  sc["r_min"] = rep.spec.r_min;
  sc["r_b"] = rep.spec.r_b;
  sc["grid_count"] = rep.spec.grid_count;
  sc["tau_b"] = rep.spec.tau_b;
  sc["delta"] = rep.spec.audit.delta;
  auto& st = j["stages"];
  st = nlohmann::ordered_json::array();
  for (const auto& s : rep.stages) {
    nlohmann::ordered_json e;
    e["name"] = s.name;
    e["status"] = s.status;
    if (!s.error.empty()) e["error"] = s.error;
    st.push_back(e);
  }
  j["observables"] = rep.observables;
  auto& vs = j["verdicts"];
  vs = nlohmann::ordered_json::array();
  for (const auto& v : rep.verdicts) vs.push_back(detail::verdict_json(v));
  auto& cs = j["criteria"];
  cs = nlohmann::ordered_json::array();
  for (const auto& c : rep.criteria) cs.push_back(detail::criterion_json(c));
  j["notes"] = rep.notes;
  j["hard_failure"] = rep.hard_failure;
  return j;
}

// Writes the report in the requested format; returns the written paths.
inline std::vector<std::string> emit(const RunReport& rep,
                                     const std::string& format,
                                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string base =
      (fs::path(out_dir) / (rep.spec.name.empty() ? "report" : rep.spec.name))
          .string();
  std::vector<std::string> written;
  auto open = [&](const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
  };
  if (format == "json") {
    auto out = open(base + ".json");
    out << report_json(rep).dump(2) << "\n";
    written.push_back(base + ".json");
  } else if (format == "csv") {
    auto out = open(base + ".csv");
    out << "key,value\n";
    for (const auto& [k, v] : rep.observables) out << k << "," << v << "\n";
    for (const auto& v : rep.verdicts)
      out << "verdict." << v.name << "," << (v.holds ? 1 : 0) << "\n";
    for (const auto& c : rep.criteria)
      out << "criterion." << criterion_name(c.criterion) << ","
          << conclusion_name(c.conclusion) << "\n";
    written.push_back(base + ".csv");
  } else if (format == "plotdata") {
    {
      auto out = open(base + "_flow.dat");
      out << "# t m_H A r\n";
      for (const auto& s : rep.flow.samples)
        out << s.t << " " << s.m_H << " " << s.A << " " << s.r << "\n";
      written.push_back(base + "_flow.dat");
    }
    {
      auto out = open(base + "_profile.dat");
      out << "# r rho a\n";
      for (std::size_t i = 0; i < rep.profile_r.size(); ++i)
        out << rep.profile_r[i] << " " << rep.profile_rho[i] << " "
            << rep.profile_a[i] << "\n";
      written.push_back(base + "_profile.dat");
    }
  } else {
    throw std::invalid_argument("unknown format: " + format);
  }
  return written;
}

// ---------------------------------------------------------------------------
// Convergence sweeps

enum class SweepAxis { grid, delta, r_b, m, eps_min };

inline std::optional<SweepAxis> sweep_axis_from_name(const std::string& s) {
  if (s == "grid" || s == "grid.count") return SweepAxis::grid;
  if (s == "delta") return SweepAxis::delta;
  if (s == "r_b") return SweepAxis::r_b;
  if (s == "m") return SweepAxis::m;
  if (s == "eps_min") return SweepAxis::eps_min;
  return std::nullopt;
}

inline const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::grid: return "grid";
    case SweepAxis::delta: return "delta";
    case SweepAxis::r_b: return "r_b";
    case SweepAxis::m: return "m";
    default: return "eps_min";
  }
}

struct SweepResult {
  SweepAxis axis = SweepAxis::grid;
  std::vector<double> values;
  std::vector<RunReport> reports;
  // Richardson observed order per observable, from the last value triple
  // (meaningful for refinement axes)
  std::map<std::string, double> orders;
};

inline std::size_t thread_cap() {
  if (const char* env = std::getenv("PENROSE_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

inline SweepResult sweep(const ScenarioSpec& base, SweepAxis axis,
                         const std::vector<double>& values) {
  SweepResult out;
  out.axis = axis;
  out.values = values;
  std::vector<ScenarioSpec> specs;
  for (double v : values) {
    ScenarioSpec s = base;
    switch (axis) {
      case SweepAxis::grid: s.grid_count = static_cast<std::size_t>(v); break;
      case SweepAxis::delta: s.audit.delta = v; break;
      case SweepAxis::r_b: s.r_b = v; break;
      case SweepAxis::m: s.m = v; break;
      case SweepAxis::eps_min: s.jang_eps_min = v; break;
    }
    specs.push_back(std::move(s));
  }
  out.reports.resize(specs.size());
  const std::size_t cap = std::max<std::size_t>(1, thread_cap());
  std::size_t next = 0;
  while (next < specs.size()) {
    std::vector<std::future<RunReport>> batch;
    const std::size_t hi = std::min(specs.size(), next + cap);
    for (std::size_t i = next; i < hi; ++i)
      batch.push_back(std::async(std::launch::async,
                                 [&specs, i] { return run_pipeline(specs[i]); }));
    for (std::size_t i = next; i < hi; ++i)
      out.reports[i] = batch[i - next].get();
    next = hi;
  }
  // grid resolution enters the error model through the spacing h ~ 1/value
  auto h_of = [axis](double v) {
    return axis == SweepAxis::grid ? 1.0 / v : v;
  };
  if (values.size() >= 3) {
    std::map<std::string, int> seen;
    for (const auto& r : out.reports)
      for (const auto& [k, v] : r.observables) seen[k]++;
    for (const auto& [k, cnt] : seen) {
      if (cnt != static_cast<int>(out.reports.size())) continue;
      const std::size_t n = values.size();
      const double f0 = out.reports[n - 3].observables.at(k);
      const double f1 = out.reports[n - 2].observables.at(k);
      const double f2 = out.reports[n - 1].observables.at(k);
      const double e01 = std::abs(f0 - f1), e12 = std::abs(f1 - f2);
      const double hr = h_of(values[n - 3]) / h_of(values[n - 2]);
      if (e12 > 0.0 && e01 > 0.0 && hr > 1.0)
        out.orders[k] = std::log(e01 / e12) / std::log(hr);
    }
  }
  return out;
}

inline std::vector<std::string> emit_sweep(const SweepResult& sw,
                                           const std::string& name,
                                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string base = (fs::path(out_dir) / name).string();
  std::vector<std::string> written;
  {
    std::ofstream out(base + "_sweep.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + base + "_sweep.csv");
    // union of observable keys, ordered
    std::map<std::string, int> keys;
    for (const auto& r : sw.reports)
      for (const auto& [k, v] : r.observables) keys[k] = 1;
    out << sweep_axis_name(sw.axis);
    for (const auto& [k, one] : keys) out << "," << k;
    out << "\n";
    for (std::size_t i = 0; i < sw.reports.size(); ++i) {
      out << sw.values[i];
      for (const auto& [k, one] : keys) {
        out << ",";
        const auto it = sw.reports[i].observables.find(k);
        if (it != sw.reports[i].observables.end()) out << it->second;
      }
      out << "\n";
    }
    written.push_back(base + "_sweep.csv");
  }
  {
    std::ofstream out(base + "_orders.csv", std::ios::binary);
    out << "observable,order\n";
    for (const auto& [k, o] : sw.orders) out << k << "," << o << "\n";
    written.push_back(base + "_orders.csv");
  }
  return written;
}

}  // namespace penrose

#endif  // PENROSE_PIPELINE_HPP_
