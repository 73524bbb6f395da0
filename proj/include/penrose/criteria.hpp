#ifndef PENROSE_CRITERIA_HPP_
#define PENROSE_CRITERIA_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "penrose/config.hpp"
#include "penrose/grid.hpp"
#include "penrose/hulls.hpp"
#include "penrose/initial_data.hpp"
#include "penrose/jang.hpp"
#include "penrose/quasilocal.hpp"
#include "penrose/report.hpp"

namespace penrose {

// ---------------------------------------------------------------------------
// Minimal-surface area coefficient

// alpha^2 = min{1, C * K^{-2} int_0^r sin(K tau)^2 / tau dtau / denominator}.
// K is the square root of the sectional curvature upper bound; K -> 0
// degenerates smoothly to the flat integral r^2 / 2.
struct MeeksYauConstant {
  double C_absolute = 1.0;
  double K_bound = 0.0;    // sectional curvature upper bound (K^2)
  double r_eff = 0.0;
  double denominator = 0.0;
  double integral = 0.0;   // K^{-2} int_0^{r_eff} sin(K tau)^2 / tau dtau
  double alpha = 1.0;
};

inline MeeksYauConstant meeks_yau_alpha(double C_absolute, double K_bound,
                                        double r_eff, double denominator) {
  if (C_absolute <= 0.0 || r_eff <= 0.0 || denominator <= 0.0)
    throw PreconditionError("meeks_yau_alpha: nonpositive input");
  MeeksYauConstant mc;
  mc.C_absolute = C_absolute;
  mc.K_bound = std::max(K_bound, 0.0);
  mc.r_eff = r_eff;
  mc.denominator = denominator;
  const double K = std::sqrt(mc.K_bound);
  if (K * r_eff < 1e-6) {
    mc.integral = 0.5 * r_eff * r_eff;
  } else {
    const std::size_t n = 4097;
    std::vector<double> tau(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
      tau[i] = r_eff * static_cast<double>(i) / static_cast<double>(n - 1);
      const double s = std::sin(K * tau[i]);
      f[i] = (i == 0) ? 0.0 : s * s / tau[i];
    }
    mc.integral = integrate(tau, f) / (K * K);
  }
  mc.alpha = std::sqrt(std::min(1.0, C_absolute * mc.integral / denominator));
  return mc;
}

// ---------------------------------------------------------------------------
// Shi-Tam quasi-local mass over sphere hulls

struct SubdomainPair {
  double r1_lo = 0.0, r1_hi = 0.0;  // Omega_1
  double r2_lo = 0.0, r2_hi = 0.0;  // Omega_2, must contain Omega_1
};

struct ShiTamResult {
  MassValue mass;
  MeeksYauConstant coeff;    // for the pair attaining the sup
  double best_mH = 0.0;      // Hawking mass before the alpha factor
  double best_radius = 0.0;
  std::size_t best_pair = 0;
};

namespace detail {

// sup over node spheres with radius in [r_lo, r_hi] that are outward
// minimizing within [radius, r_out] of the round-sphere Hawking mass;
// floored at zero.  boundary_only restricts competitors to spheres whose
// boundary touches the outer boundary of Omega_1 (the concentric-sphere
// realization of the intersection constraint).
inline void best_hawking_sphere(const RadialMetric& m,
                                const std::vector<double>& H, double r_lo,
                                double r_hi, double r_out,
                                const Tolerances& tol, bool boundary_only,
                                double* best_mH, double* best_radius) {
  *best_mH = 0.0;
  *best_radius = r_hi;
  for (std::size_t i = 0; i < m.grid.count(); ++i) {
    const double r = m.grid.nodes[i];
    if (r < r_lo - 1e-12 || r > r_hi + 1e-12) continue;
    if (boundary_only && r < r_hi - 1e-12) continue;
    // outward minimizing within Omega_2
    const double A_r = m.area(i);
    const double slack = area_slack(m, r, tol);
    bool minimizing = true;
    for (std::size_t j = i; j < m.grid.count(); ++j) {
      if (m.grid.nodes[j] > r_out + 1e-12) break;
      if (m.area(j) < A_r - slack) {
        minimizing = false;
        break;
      }
    }
    if (!minimizing) continue;
    const double scale = std::sqrt(A_r / (16.0 * kPi));
    double mH = scale * (1.0 - A_r * H[i] * H[i] / (16.0 * kPi));
    if (std::abs(mH) < 1e-10 * scale) mH = 0.0;  // discretization noise floor
    if (mH > *best_mH) {
      *best_mH = mH;
      *best_radius = r;
    }
  }
}

// Sectional curvature upper bound restricted to [r_lo, r_hi].
inline double sectional_bound_on(const RadialMetric& m,
                                 const CurvatureProfile& curv, double r_lo,
                                 double r_hi) {
  double c = 0.0;
  for (std::size_t i = 0; i < m.grid.count(); ++i) {
    const double r = m.grid.nodes[i];
    if (r < r_lo - 1e-12 || r > r_hi + 1e-12) continue;
    c = std::max(c, std::max(curv.K_rad[i], curv.K_tan[i]));
  }
  return c;
}

inline ShiTamResult shi_tam_over(const RadialMetric& m,
                                 const std::vector<SubdomainPair>& pairs,
                                 double C_absolute, const Tolerances& tol,
                                 bool boundary_only, double denom_factor,
                                 MassKind kind) {
  m.validate();
  if (pairs.empty()) throw PreconditionError("no subdomain pairs supplied");
  const auto H = mean_curvature_nodes(m);
  const auto curv = curvature_profile(m);
  CubicInterpolant rho_i(m.grid.nodes, m.rho);

  ShiTamResult out;
  out.mass.kind = kind;
  out.mass.value = 0.0;
  bool first = true;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& pr = pairs[p];
    if (!(pr.r2_lo <= pr.r1_lo && pr.r1_hi <= pr.r2_hi && pr.r1_lo < pr.r1_hi))
      throw PreconditionError("subdomain pair must satisfy Omega_1 in Omega_2");
    double mH = 0.0, r_best = pr.r1_hi;
    best_hawking_sphere(m, H, pr.r1_lo, pr.r1_hi, pr.r2_hi, tol, boundary_only,
                        &mH, &r_best);
    const double K2 = sectional_bound_on(m, curv, pr.r2_lo, pr.r2_hi);
    const double proxy =
        kPi / std::sqrt(std::max(K2, 1e-300));  // conjugate-point proxy
    const double half_len = 0.5 * m.geodesic_length(pr.r2_lo, pr.r2_hi);
    const double r_eff = std::min(proxy, half_len);
    const double rb = rho_i(pr.r1_hi);
    const double denom = 4.0 * kPi * rb * rb * denom_factor;
    const auto mc = meeks_yau_alpha(C_absolute, K2, r_eff, denom);
    const double val = mc.alpha * mH;
    if (first || val > out.mass.value) {
      first = false;
      out.mass.value = val;
      out.coeff = mc;
      out.best_mH = mH;
      out.best_radius = r_best;
      out.best_pair = p;
    }
  }
  return out;
}

// Resample to the uniform proper-distance gauge: a == 1 and the node count is
// proportional to arclength, so plateau classification weighs a steep-chart
// neck by its actual length.
inline RadialMetric resample_proper_distance(const RadialMetric& m,
                                             std::size_t count = 4096) {
  m.validate();
  const std::size_t n = m.grid.count();
  std::vector<double> sigma(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    sigma[i] = sigma[i - 1] + 0.5 *
                                  (std::sqrt(m.a[i - 1]) + std::sqrt(m.a[i])) *
                                  (m.grid.nodes[i] - m.grid.nodes[i - 1]);
  RadialMetric out;
  out.grid = RadialGrid::uniform(0.0, sigma.back(), count);
  out.a.assign(count, 1.0);
  out.rho.resize(count);
  // piecewise-linear in sigma: the arclength knots are extremely nonuniform
  // near steep necks, where spline slopes from uniform-spacing stencils break
  std::size_t j = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double s = out.grid.nodes[i];
    while (j + 2 < n && sigma[j + 1] < s) ++j;
    const double t = (s - sigma[j]) / (sigma[j + 1] - sigma[j]);
    out.rho[i] = (1.0 - t) * m.rho[j] + t * m.rho[j + 1];
  }
  return out;
}

}  // namespace detail

inline ShiTamResult shi_tam_mass(const RadialMetric& m,
                                 const std::vector<SubdomainPair>& pairs,
                                 double C_absolute = 1.0,
                                 const Tolerances& tol = {}) {
  return detail::shi_tam_over(m, pairs, C_absolute, tol,
                              /*boundary_only=*/false, /*denom_factor=*/1.0,
                              MassKind::shi_tam);
}

// ---------------------------------------------------------------------------
// m* over the deformed graph

struct MStarResult {
  ShiTamResult st;
  double beta = 1.0;
  RadResult rad_graph;
  RadResult rad_data;
};

inline MStarResult m_star(const SphericalInitialData& data,
                          const JangGraph& graph, double C_absolute = 1.0,
                          const Tolerances& tol = {}) {
  MStarResult out;
  out.rad_data = rad(detail::resample_proper_distance(data.metric));
  out.rad_graph = rad(detail::resample_proper_distance(graph.metric));
  out.beta = out.rad_graph.value / out.rad_data.value;
  const auto& g = graph.metric.grid;
  SubdomainPair whole{g.r_min(), g.r_max(), g.r_min(), g.r_max()};
  // competitors must touch the boundary of Omega_1: with concentric spheres
  // only the boundary sphere itself qualifies, a strict subset of the
  // Shi-Tam family
  out.st = detail::shi_tam_over(graph.metric, {whole}, C_absolute, tol,
                                /*boundary_only=*/true,
                                /*denom_factor=*/out.beta, MassKind::m_star);
  return out;
}

// ---------------------------------------------------------------------------
// Criterion verdicts

enum class CriterionKind {
  thm14_mass,
  thm14_diam,
  prop15,
  prop16_mass,
  prop16_diam,
  prop17,
  schoen_yau
};

enum class Conclusion { exists, not_exists, inconclusive };

inline const char* criterion_name(CriterionKind k) {
  switch (k) {
    case CriterionKind::thm14_mass: return "hoop_mass";
    case CriterionKind::thm14_diam: return "hoop_diameter";
    case CriterionKind::prop15: return "isoperimetric";
    case CriterionKind::prop16_mass: return "shi_tam_mass";
    case CriterionKind::prop16_diam: return "shi_tam_diameter";
    case CriterionKind::prop17: return "curvature_nonexistence";
    default: return "pointwise_energy";
  }
}

inline const char* conclusion_name(Conclusion c) {
  switch (c) {
    case Conclusion::exists: return "exists";
    case Conclusion::not_exists: return "not_exists";
    default: return "inconclusive";
  }
}

struct CriterionVerdict {
  CriterionKind criterion = CriterionKind::schoen_yau;
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  Conclusion conclusion = Conclusion::inconclusive;
  std::string detail;
  std::map<std::string, double> values;
};

namespace detail {

// A nonexistence verdict contradicted by a directly located MOTS in the same
// domain is a pipeline defect, not a data point.
inline void guard_not_exists(const SphericalInitialData& data, Conclusion c,
                             const Tolerances& tol) {
  if (c != Conclusion::not_exists) return;
  if (auto m = find_outermost_mots(data, tol))
    throw SolverError(
        "criterion concluded nonexistence but a marginally trapped sphere "
        "was located at r = " +
        std::to_string(m->radius));
}

inline void record_mots_check(const SphericalInitialData& data,
                              const Tolerances& tol, CriterionVerdict* v) {
  const auto m = find_outermost_mots(data, tol);
  v->values["mots_found"] = m ? 1.0 : 0.0;
  if (m) v->values["mots_radius"] = m->radius;
  v->values["agreement"] =
      (v->conclusion == Conclusion::exists) ? (m ? 1.0 : 0.0) : 1.0;
  guard_not_exists(data, v->conclusion, tol);
}

inline double boundary_diameter(const SphericalInitialData& data) {
  // round boundary spheres: diameter of the circumscribing sphere
  return 2.0 * data.metric.rho.back();
}

}  // namespace detail

// Hoop-type existence test: m* > m_LY(boundary), or m* >= diam(boundary)/4.
inline std::vector<CriterionVerdict> evaluate_thm14(
    const SphericalInitialData& data, const JangGraph& graph,
    double C_absolute = 1.0, const Tolerances& tol = {}) {
  const auto ms = m_star(data, graph, C_absolute, tol);
  const double m_LY = liu_yau_mass(boundary_surface(data)).value;
  const double diam = detail::boundary_diameter(data);

  std::vector<CriterionVerdict> out(2);
  out[0].criterion = CriterionKind::thm14_mass;
  out[0].lhs = ms.st.mass.value;
  out[0].rhs = m_LY;
  out[0].holds = out[0].lhs > out[0].rhs;
  out[1].criterion = CriterionKind::thm14_diam;
  out[1].lhs = ms.st.mass.value;
  out[1].rhs = 0.25 * diam;
  out[1].holds = out[1].lhs >= out[1].rhs;
  for (auto& v : out) {
    v.conclusion = v.holds ? Conclusion::exists : Conclusion::inconclusive;
    v.values["m_star"] = ms.st.mass.value;
    v.values["beta"] = ms.beta;
    v.values["alpha"] = ms.st.coeff.alpha;
    v.values["liu_yau"] = m_LY;
    v.values["diameter"] = diam;
    detail::record_mots_check(data, tol, &v);
  }
  return out;
}

// Isoperimetric dichotomy and the Shi-Tam detection test over the graph.
inline std::vector<CriterionVerdict> evaluate_prop15_16(
    const SphericalInitialData& data, const JangGraph& graph,
    std::optional<double> isoperimetric_radius = std::nullopt,
    double C_absolute = 1.0, const Tolerances& tol = {}) {
  const auto& m = graph.metric;
  m.validate();
  const double m_LY = liu_yau_mass(boundary_surface(data)).value;
  const double diam = detail::boundary_diameter(data);

  // area-vs-volume scan over centered spheres: a sphere beating the
  // Euclidean isoperimetric ratio marks the candidate
  double iso_r = 0.0, iso_ratio = std::numeric_limits<double>::infinity();
  {
    const std::size_t n = m.grid.count();
    std::vector<double> V(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      const double f0 = 4.0 * kPi * m.rho[i - 1] * m.rho[i - 1] *
                        std::sqrt(m.a[i - 1]);
      const double f1 = 4.0 * kPi * m.rho[i] * m.rho[i] * std::sqrt(m.a[i]);
      V[i] = V[i - 1] + 0.5 * (f0 + f1) * (m.grid.nodes[i] - m.grid.nodes[i - 1]);
    }
    for (std::size_t i = 8; i < n; ++i) {
      const double A = m.area(i);
      const double ratio = A * A * A / (36.0 * kPi * V[i] * V[i]);
      if (ratio < iso_ratio) {
        iso_ratio = ratio;
        iso_r = m.grid.nodes[i];
      }
    }
  }
  const bool iso_candidate =
      isoperimetric_radius.has_value() || iso_ratio < 1.0 - 1e-3;
  const double r_iso = isoperimetric_radius.value_or(iso_r);

  std::vector<CriterionVerdict> out(3);
  auto& p15 = out[0];
  p15.criterion = CriterionKind::prop15;
  p15.rhs = m_LY;
  p15.values["iso_ratio"] = iso_ratio;
  p15.values["iso_scan_radius"] = iso_r;
  if (iso_candidate) {
    const auto hull = strictly_minimizing_hull(m, r_iso, tol);
    const auto H = detail::mean_curvature_nodes(m);
    CubicInterpolant Hi(m.grid.nodes, H);
    const double A_h = hull.area_hull;
    const double Hh = Hi(hull.r_hull);
    const double mH_hull = std::sqrt(A_h / (16.0 * kPi)) *
                           (1.0 - A_h * Hh * Hh / (16.0 * kPi));
    p15.lhs = mH_hull;
    p15.holds = mH_hull >= m_LY;
    p15.values["iso_radius"] = r_iso;
    p15.values["hull_radius"] = hull.r_hull;
    p15.conclusion = p15.holds ? Conclusion::exists : Conclusion::inconclusive;
  } else {
    p15.detail = "no isoperimetric candidate below the Euclidean ratio";
    p15.conclusion = Conclusion::inconclusive;
  }

  SubdomainPair whole{m.grid.r_min(), m.grid.r_max(), m.grid.r_min(),
                      m.grid.r_max()};
  const auto st = shi_tam_mass(m, {whole}, C_absolute, tol);
  auto& p16m = out[1];
  p16m.criterion = CriterionKind::prop16_mass;
  p16m.lhs = st.mass.value;
  p16m.rhs = m_LY;
  p16m.holds = p16m.lhs > p16m.rhs;
  auto& p16d = out[2];
  p16d.criterion = CriterionKind::prop16_diam;
  p16d.lhs = st.mass.value;
  p16d.rhs = 0.25 * diam;
  p16d.holds = p16d.lhs >= p16d.rhs;
  for (std::size_t i = 1; i < 3; ++i) {
    out[i].conclusion =
        out[i].holds ? Conclusion::exists : Conclusion::inconclusive;
    out[i].values["shi_tam"] = st.mass.value;
    out[i].values["alpha"] = st.coeff.alpha;
  }

  const auto min_sphere = find_outermost_minimal(m, tol);
  for (auto& v : out) {
    v.values["minimal_found"] = min_sphere ? 1.0 : 0.0;
    if (min_sphere) v.values["minimal_radius"] = min_sphere->radius;
    v.values["agreement"] =
        (v.conclusion == Conclusion::exists) ? (min_sphere ? 1.0 : 0.0) : 1.0;
    detail::guard_not_exists(data, v.conclusion, tol);
  }
  return out;
}

// Curvature-based nonexistence: a boundary mass below 1/(2C), where C^2
// bounds the graph's sectional curvature, rules out minimal surfaces.
inline CriterionVerdict evaluate_prop17(const SphericalInitialData& data,
                                        const JangGraph& graph,
                                        MassKind mass_kind = MassKind::liu_yau,
                                        const Tolerances& tol = {}) {
  const auto b = boundary_surface(data);
  double m_b;
  if (mass_kind == MassKind::wang_yau_energy) {
    m_b = wang_yau_energy(b, [](double) { return 0.0; }).value;
  } else {
    m_b = liu_yau_mass(b).value;
  }

  const auto curv = curvature_profile(graph.metric);
  const double C2 = curv.sectional_upper_bound();
  double C = std::sqrt(C2);
  // differentiation noise on an exactly flat graph must read as zero bound
  if (C <= tol.discretization(graph.metric.grid.spacing())) C = 0.0;

  CriterionVerdict v;
  v.criterion = CriterionKind::prop17;
  v.lhs = m_b;
  v.values["C"] = C;
  if (C <= 0.0) {
    v.rhs = std::numeric_limits<double>::infinity();
    v.holds = true;
    v.conclusion = Conclusion::not_exists;
    v.detail = "flat graph: no closed minimal surface at any mass";
  } else {
    v.rhs = 0.5 / C;
    v.holds = m_b < v.rhs;
    v.conclusion = v.holds ? Conclusion::not_exists : Conclusion::inconclusive;
  }

  // Gauss-Bonnet consistency: any detected minimal sphere S must satisfy
  // 4 pi <= |S| C^2, which forces the boundary mass above sqrt(|S|/16pi)
  if (const auto ms = find_outermost_minimal(graph.metric, tol)) {
    CubicInterpolant rho_i(graph.metric.grid.nodes, graph.metric.rho);
    const double p = rho_i(ms->radius);
    const double area = 4.0 * kPi * p * p;
    v.values["minimal_found"] = 1.0;
    v.values["minimal_radius"] = ms->radius;
    v.values["minimal_area"] = area;
    v.values["gauss_bonnet_lower"] = std::sqrt(area / (16.0 * kPi));
  } else {
    v.values["minimal_found"] = 0.0;
  }
  detail::guard_not_exists(data, v.conclusion, tol);
  return v;
}

// Pointwise dominant-energy size criterion: Lambda = min(mu - |J|) > 0 and
// Rad(Omega) >= sqrt(3/2) pi / sqrt(Lambda) force a MOTS.
inline CriterionVerdict schoen_yau_criterion(const SphericalInitialData& data,
                                             const Tolerances& tol = {}) {
  data.validate();
  const auto em = compute_constraints(data);
  double lambda = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < em.mu.size(); ++i)
    lambda = std::min(
        lambda, em.mu[i] - std::abs(em.J_r[i]) / std::sqrt(data.metric.a[i]));
  const auto rr = rad(data.metric);

  CriterionVerdict v;
  v.criterion = CriterionKind::schoen_yau;
  v.lhs = rr.value;
  v.values["lambda"] = lambda;
  v.values["rad"] = rr.value;
  if (lambda > 0.0) {
    v.rhs = std::sqrt(1.5) * kPi / std::sqrt(lambda);
    v.holds = rr.value >= v.rhs;
  } else {
    v.rhs = std::numeric_limits<double>::infinity();
    v.holds = false;
    v.detail = "energy margin mu - |J| is not strictly positive";
  }
  v.conclusion = v.holds ? Conclusion::exists : Conclusion::inconclusive;
  detail::record_mots_check(data, tol, &v);
  return v;
}

}  // namespace penrose

#endif  // PENROSE_CRITERIA_HPP_
