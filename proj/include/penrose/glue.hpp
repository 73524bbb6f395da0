#ifndef PENROSE_GLUE_HPP_
#define PENROSE_GLUE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "penrose/config.hpp"
#include "penrose/grid.hpp"
#include "penrose/initial_data.hpp"
#include "penrose/jang.hpp"
#include "penrose/report.hpp"

namespace penrose {

// ---------------------------------------------------------------------------
// Round zero-scalar-curvature extension.
//
// For a round boundary sphere the quasi-spherical extension is an exterior
// slice of Schwarzschild: given area A = 4 pi rho_b^2 and mean curvature
// Hbar, the mass parameter solves Hbar = (2/rho_b) sqrt(1 - 2 m / rho_b).

struct RoundExtension {
  double A = 0.0;
  double Hbar = 0.0;
  double rho_b = 0.0;
  double m_ext = 0.0;
  double r_far = 0.0;
  RadialMetric metric;     // area-radius chart samples on [rho_b, r_far]
  VerdictReport eq_check;  // verbatim evaluation of the extension-mass bound
};

inline RoundExtension shi_tam_round_extension(double A, double Hbar,
                                              std::size_t grid_count = 4096,
                                              double r_far_factor = 100.0) {
  if (!(A > 0.0)) throw PreconditionError("extension requires area > 0");
  if (!(Hbar > 0.0))
    throw PreconditionError("extension requires mean curvature > 0");
  RoundExtension ext;
  ext.A = A;
  ext.Hbar = Hbar;
  ext.rho_b = std::sqrt(A / (4.0 * kPi));
  const double x = Hbar * ext.rho_b / 2.0;
  ext.m_ext = 0.5 * ext.rho_b * (1.0 - x * x);  // may be negative
  ext.r_far = r_far_factor * ext.rho_b;

  ext.metric.grid = RadialGrid::uniform(ext.rho_b, ext.r_far, grid_count);
  ext.metric.rho = ext.metric.grid.nodes;
  ext.metric.a.resize(grid_count);
  for (std::size_t i = 0; i < grid_count; ++i)
    ext.metric.a[i] = 1.0 / (1.0 - 2.0 * ext.m_ext / ext.metric.rho[i]);

  // The round-boundary mass bound, evaluated verbatim:
  //   (1/8pi) Int (H0_hat - Hbar) dA  vs  m_ADM(extension) = m_ext,
  // with H0_hat = 2 / rho_b the flat-space round mean curvature.  The
  // comparison is recorded, not asserted (its direction fails for round
  // Schwarzschild data; see the report detail).
  const double H0_hat = 2.0 / ext.rho_b;
  const double lhs = (1.0 / (16.0 * kPi)) * A * (H0_hat - Hbar);
  ext.eq_check =
      VerdictReport("extension_mass_bound", lhs >= ext.m_ext - 1e-12, lhs,
                    ext.m_ext, 1e-12,
                    "round-boundary extension mass comparison; recorded, not "
                    "asserted (its direction fails for round data under this "
                    "normalization, see brown_york for the 1/8pi-normalized "
                    "surface integral, which does dominate m_ext)");
  ext.eq_check.values["H0_hat"] = H0_hat;
  ext.eq_check.values["rho_b"] = ext.rho_b;
  ext.eq_check.values["brown_york"] = (1.0 / (8.0 * kPi)) * A * (H0_hat - Hbar);
  return ext;
}

// ---------------------------------------------------------------------------
// Corner smoothing on the delta-tube.
//
// Both sides are rewritten in proper-distance gauge, ds^2 = dsigma^2 +
// rho(sigma)^2 dOmega^2, with sigma = 0 at the corner.  Matching mean
// curvature makes rho C^1 there, so the corner carries only a jump in
// rho''; a quartic-bump mollification confined to [-delta/2, delta/2]
// removes it.  The 1-form X is cut off by a smooth decreasing varsigma
// that equals 1 inside sigma <= -delta^{1/3}/2 and 0 past sigma =
// -delta^2/200; its slope is O(delta^{-1/3}).  (A cutoff confined to the
// width-delta/2 tube could not drop from 1 to 0 with slope delta^{-1/3};
// the transition width must scale like delta^{1/3}.)

struct GluedData {
  RadialMetric metric;   // composite, a == 1, coordinate s = sigma - sigma_min
  double sigma_min = 0.0;      // graph-side proper distance at the inner edge
  double corner_s = 0.0;       // s-coordinate of the corner
  double delta = 0.0;
  double rho_b = 0.0;
  double m_ext = 0.0;
  std::vector<double> rho_p;         // d rho / d sigma (analytic per node)
  std::vector<double> rho_pp;        // d^2 rho / d sigma^2
  std::vector<double> R_profile;     // scalar curvature of the composite
  std::vector<double> K_delta_minus; // negative part of R_profile
  std::vector<double> X_sigma;       // cutoff-applied 1-form component
  std::vector<double> divX_delta;
  // fine tube diagnostics
  std::vector<double> tube_sigma;
  std::vector<double> tube_K_minus;
  std::vector<double> tube_divX;
  double C1_measured = 0.0;
  double x_nu_integral = 0.0;  // Int X(nu) dA at the corner, pre-cutoff side
};

namespace detail {

// quartic bump on [-eta, eta], unit mass
struct QuarticBump {
  double eta;
  double norm;  // 15 / (16 eta)
  explicit QuarticBump(double e) : eta(e), norm(15.0 / (16.0 * e)) {}
  double operator()(double t) const {
    const double x = t / eta;
    if (std::abs(x) >= 1.0) return 0.0;
    const double q = 1.0 - x * x;
    return norm * q * q;
  }
  double d1(double t) const {
    const double x = t / eta;
    if (std::abs(x) >= 1.0) return 0.0;
    return norm * (-4.0 * x * (1.0 - x * x)) / eta;
  }
  // one-sided polynomial value at the support edge, where phi'' jumps;
  // integration runs over the closed support, so the inner limit applies
  double d2(double t) const {
    const double x = t / eta;
    if (std::abs(x) > 1.0) return 0.0;
    return norm * (12.0 * x * x - 4.0) / (eta * eta);
  }
};

// smoothstep on [lo, hi] rising 0 -> 1
inline double smoothstep(double x, double lo, double hi) {
  const double t = std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}
inline double smoothstep_d(double x, double lo, double hi) {
  const double t = (x - lo) / (hi - lo);
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 6.0 * t * (1.0 - t) / (hi - lo);
}

// Proper-distance description of one side of the corner.
struct SideProfile {
  // graph side: interpolants in sigma (<= 0)
  std::vector<double> sigma_nodes;
  std::vector<double> rho_nodes, rho_p_nodes, rho_pp_nodes;
  std::optional<CubicInterpolant> rho_i, rho_p_i, rho_pp_i;
  // extension side: closed form with mass m
  double m = 0.0;
  double rho_b = 0.0;

  double sigma_of_rho(double rho) const {
    if (std::abs(m) < 1e-14 * rho_b) return rho - rho_b;
    auto I = [&](double p) {
      return std::sqrt(p * (p - 2.0 * m)) +
             2.0 * m * std::log(std::sqrt(p) + std::sqrt(p - 2.0 * m));
    };
    return I(rho) - I(rho_b);
  }
  double rho_of_sigma(double sigma) const {
    if (std::abs(m) < 1e-14 * rho_b) return rho_b + sigma;
    double p = std::max(rho_b + sigma, 2.0 * m * 1.0000001);
    for (int it = 0; it < 100; ++it) {
      const double f = sigma_of_rho(p) - sigma;
      const double dpds = std::sqrt(1.0 - 2.0 * m / p);
      const double step = f * dpds;
      p -= step;
      p = std::max(p, 0.5 * rho_b);
      if (std::abs(step) < 1e-15 * p) break;
    }
    return p;
  }
};

}  // namespace detail

// Outward mean curvature of the graph's boundary sphere, measured with the
// same stencil smooth_corner uses; build the round extension from this
// value so the corner matching hypothesis holds by construction.
inline double boundary_mean_curvature(const JangGraph& graph) {
  const auto& g = graph.metric.grid;
  const auto rho_r_p = fd::derivative(g.nodes, graph.metric.rho);
  return 2.0 * rho_r_p.back() /
         (graph.metric.rho.back() * std::sqrt(graph.gbar_rr.back()));
}

inline GluedData smooth_corner(const JangGraph& graph,
                               const RoundExtension& ext, double delta,
                               const Tolerances& tol = {}) {
  if (!(delta > 0.0) || delta >= 0.5)
    throw DegenerateInputError("delta must lie in (0, 0.5)");
  const auto& g = graph.metric.grid;
  const std::size_t ng = g.count();

  // graph side in proper distance, sigma = 0 at the corner
  std::vector<double> sqa(ng);
  for (std::size_t i = 0; i < ng; ++i) sqa[i] = std::sqrt(graph.gbar_rr[i]);
  std::vector<double> sig(ng, 0.0);
  for (std::size_t i = 1; i < ng; ++i)
    sig[i] = sig[i - 1] +
             0.5 * (sqa[i] + sqa[i - 1]) * (g.nodes[i] - g.nodes[i - 1]);
  const double sig_b = sig.back();
  for (double& s : sig) s -= sig_b;

  const auto rho_r_p = fd::derivative(g.nodes, graph.metric.rho);
  std::vector<double> rho_s_p(ng);  // d rho / d sigma
  for (std::size_t i = 0; i < ng; ++i) rho_s_p[i] = rho_r_p[i] / sqa[i];
  const auto rho_s_p_r = fd::derivative(g.nodes, rho_s_p);
  std::vector<double> rho_s_pp(ng);
  for (std::size_t i = 0; i < ng; ++i) rho_s_pp[i] = rho_s_p_r[i] / sqa[i];

  // corner mean-curvature match (the smoothing hypothesis)
  const double H_graph =
      2.0 * rho_s_p.back() / graph.metric.rho.back();
  if (std::abs(H_graph - ext.Hbar) >
      tol.corner_match * std::max(1.0, std::abs(ext.Hbar)))
    throw PreconditionError(
        "corner mean curvatures do not match: graph " +
        std::to_string(H_graph) + " vs extension " + std::to_string(ext.Hbar));
  if (std::abs(graph.metric.rho.back() - ext.rho_b) >
      1e-8 * std::max(1.0, ext.rho_b))
    throw PreconditionError("corner areas do not match");

  detail::SideProfile side;
  side.sigma_nodes = sig;
  side.rho_nodes = graph.metric.rho;
  side.rho_p_nodes = rho_s_p;
  side.rho_pp_nodes = rho_s_pp;
  side.rho_i.emplace(sig, graph.metric.rho);
  side.rho_p_i.emplace(sig, rho_s_p);
  side.rho_pp_i.emplace(sig, rho_s_pp);
  side.m = ext.m_ext;
  side.rho_b = ext.rho_b;

  // C^1 base profile rho0(sigma) and its piecewise derivatives
  auto rho0 = [&](double s) {
    if (s <= 0.0) return (*side.rho_i)(std::max(s, sig.front()));
    return side.rho_of_sigma(s);
  };
  auto rho0_p = [&](double s) {
    if (s <= 0.0) return (*side.rho_p_i)(std::max(s, sig.front()));
    return std::sqrt(1.0 - 2.0 * side.m / side.rho_of_sigma(s));
  };
  auto rho0_pp = [&](double s) {
    if (s <= 0.0) return (*side.rho_pp_i)(std::max(s, sig.front()));
    const double p = side.rho_of_sigma(s);
    return side.m / (p * p);
  };

  const double eta = delta / 4.0;
  detail::QuarticBump phi(eta);
  // convolution and its exact derivatives via the mollifier's derivatives;
  // the integral is split at the corner so each Simpson piece is smooth
  auto conv = [&](double s, int order) {
    auto kern = [&](double t) {
      return order == 0 ? phi(t) : (order == 1 ? phi.d1(t) : phi.d2(t));
    };
    auto piece = [&](double t0, double t1) {
      const int np = 256;
      double acc = 0.0;
      const double h = (t1 - t0) / np;
      for (int q = 0; q < np; ++q) {
        const double a0 = t0 + h * q, a1 = a0 + h, am = 0.5 * (a0 + a1);
        acc += h / 6.0 *
               (rho0(s - a0) * kern(a0) + 4.0 * rho0(s - am) * kern(am) +
                rho0(s - a1) * kern(a1));
      }
      return acc;
    };
    if (s > -eta && s < eta) return piece(-eta, s) + piece(s, eta);
    return piece(-eta, eta);
  };

  // deformation blend: 1 on [-eta, eta], 0 outside [-2 eta, 2 eta]
  auto chi = [&](double s) {
    if (s < 0.0) return detail::smoothstep(s, -2.0 * eta, -eta);
    return 1.0 - detail::smoothstep(s, eta, 2.0 * eta);
  };
  auto chi_d = [&](double s) {
    if (s < 0.0) return detail::smoothstep_d(s, -2.0 * eta, -eta);
    return -detail::smoothstep_d(s, eta, 2.0 * eta);
  };

  auto glued_rho = [&](double s, double* d1, double* d2) {
    if (std::abs(s) >= 2.0 * eta) {
      if (d1) *d1 = rho0_p(s);
      if (d2) *d2 = rho0_pp(s);
      return rho0(s);
    }
    const double D = conv(s, 0) - rho0(s);
    const double Dp = conv(s, 1) - rho0_p(s);
    const double Dpp = conv(s, 2) - rho0_pp(s);
    const double c = chi(s), cp = chi_d(s);
    // numerical second derivative of the smoothstep blend
    const double hh = 1e-4 * eta;
    const double cpp = (chi_d(s + hh) - chi_d(s - hh)) / (2.0 * hh);
    if (d1) *d1 = rho0_p(s) + cp * D + c * Dp;
    if (d2) *d2 = rho0_pp(s) + cpp * D + 2.0 * cp * Dp + c * Dpp;
    return rho0(s) + c * D;
  };

  // cutoff varsigma for X
  const double cut_hi = -delta * delta / 200.0;
  const double cut_lo = -0.5 * std::cbrt(delta);
  auto varsigma = [&](double s) {
    return 1.0 - detail::smoothstep(s, cut_lo, cut_hi);
  };
  auto varsigma_d = [&](double s) {
    return -detail::smoothstep_d(s, cut_lo, cut_hi);
  };

  // graph-side X and div X as functions of sigma
  std::vector<double> Xs(ng), dXs(ng);
  for (std::size_t i = 0; i < ng; ++i) Xs[i] = graph.X_r[i] / sqa[i];
  CubicInterpolant X_i(sig, Xs);
  CubicInterpolant divX_i(sig, graph.divX);

  GluedData out;
  out.delta = delta;
  out.rho_b = ext.rho_b;
  out.m_ext = ext.m_ext;
  out.sigma_min = sig.front();
  out.x_nu_integral = graph.X_nu_boundary * 4.0 * kPi * ext.rho_b * ext.rho_b;

  // composite grid in s = sigma - sigma_min
  const double sigma_far = side.sigma_of_rho(ext.r_far);
  const double span = sigma_far - sig.front();
  double ds = std::min(delta / 8.0, span / 4096.0);
  ds = std::max(ds, span / 600000.0);
  const std::size_t nC = static_cast<std::size_t>(std::ceil(span / ds)) + 1;
  out.metric.grid = RadialGrid::uniform(0.0, span, nC);
  out.corner_s = -sig.front();
  out.metric.a.assign(nC, 1.0);
  out.metric.rho.resize(nC);
  out.rho_p.resize(nC);
  out.rho_pp.resize(nC);
  out.R_profile.resize(nC);
  out.K_delta_minus.resize(nC);
  out.X_sigma.resize(nC);
  out.divX_delta.resize(nC);
  for (std::size_t i = 0; i < nC; ++i) {
    const double s = out.metric.grid.nodes[i] + sig.front();
    double d1 = 0.0, d2 = 0.0;
    const double p = glued_rho(s, &d1, &d2);
    out.metric.rho[i] = p;
    out.rho_p[i] = d1;
    out.rho_pp[i] = d2;
    out.R_profile[i] = 2.0 * (1.0 - d1 * d1) / (p * p) - 4.0 * d2 / p;
    out.K_delta_minus[i] = std::max(0.0, -out.R_profile[i]);
    const double vs = varsigma(s);
    const double X_here = s <= 0.0 ? X_i(std::max(s, sig.front())) : 0.0;
    const double divX_here = s <= 0.0 ? divX_i(std::max(s, sig.front())) : 0.0;
    out.X_sigma[i] = vs * X_here;
    out.divX_delta[i] = vs * divX_here + varsigma_d(s) * X_here;
  }

  // fine tube diagnostics over the union of cutoff zone and mollifier tube
  const double tlo = cut_lo - eta;
  const double thi = delta / 2.0;
  const std::size_t nT = 2048;
  out.tube_sigma.resize(nT);
  out.tube_K_minus.resize(nT);
  out.tube_divX.resize(nT);
  double c1 = 0.0;
  for (std::size_t i = 0; i < nT; ++i) {
    const double s =
        tlo + (thi - tlo) * static_cast<double>(i) / static_cast<double>(nT - 1);
    out.tube_sigma[i] = s;
    double d1 = 0.0, d2 = 0.0;
    const double p = glued_rho(s, &d1, &d2);
    const double R = 2.0 * (1.0 - d1 * d1) / (p * p) - 4.0 * d2 / p;
    out.tube_K_minus[i] = std::max(0.0, -R);
    const double X_here = s <= 0.0 ? X_i(std::max(s, sig.front())) : 0.0;
    const double divX_here = s <= 0.0 ? divX_i(std::max(s, sig.front())) : 0.0;
    out.tube_divX[i] = varsigma(s) * divX_here + varsigma_d(s) * X_here;
    c1 = std::max(c1, std::max(out.tube_K_minus[i], std::abs(out.tube_divX[i])));
  }
  out.C1_measured = c1 * std::cbrt(delta);
  return out;
}

// ---------------------------------------------------------------------------
// Conformal deformation.
//
// Solves the radial two-point problem
//   w'' + 2 (rho'/rho) w' + (kappa/8) w = -kappa/8,
//   w'(sigma_F) = 0 (Neumann at the inner core boundary),
//   w' + (rho'/rho) w = 0 at s_far (Robin-corrected decay),
// with kappa = K_delta_minus + 2 (div X_delta)_+, and extracts the
// asymptotic coefficient A_delta twice: from the 1/rho tail and from the
// flux identity 32 pi A_delta = Int kappa (1 + w) dV.

struct ConformalSolution {
  std::vector<double> w;       // on the glued composite grid (0 below core)
  std::vector<double> kappa;
  std::size_t core_index = 0;
  double A_delta_tail = 0.0;
  double A_delta_volume = 0.0;
  double L6_norm_w = 0.0;
  double L6_bound = 0.0;       // configured Sobolev-side bound
  double Rhat_min = 0.0;       // min of conformal scalar curvature
  double m_adm_ghat = 0.0;     // Misner-Sharp tail fit of the conformal metric
  double m_adm_gplus = 0.0;    // = extension mass parameter (exact tail)
};

inline ConformalSolution solve_conformal(const GluedData& glued,
                                         double rho_F,
                                         const AuditConfig& cfg = {},
                                         const Tolerances& tol = {}) {
  const auto& grid = glued.metric.grid;
  const std::size_t n = grid.count();
  const double ds = grid.spacing();
  ConformalSolution out;
  out.m_adm_gplus = glued.m_ext;
  out.kappa.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.kappa[i] =
        glued.K_delta_minus[i] + 2.0 * std::max(glued.divX_delta[i], 0.0);

  // inner core boundary: innermost node with rho >= rho_F
  std::size_t iF = 0;
  while (iF + 1 < n && glued.metric.rho[iF] < rho_F) ++iF;
  if (iF + 16 >= n)
    throw PreconditionError("core boundary too close to the outer edge");
  out.core_index = iF;

  const std::size_t m = n - iF;  // unknowns w[iF..n-1]
  std::vector<double> lo(m, 0.0), di(m, 0.0), up(m, 0.0), rhs(m, 0.0);
  for (std::size_t j = 1; j + 1 < m; ++j) {
    // conservative form (rho^2 w')' / rho^2: the cell sums then telescope
    // exactly to the boundary fluxes, so the discrete volume extraction of
    // the asymptotic coefficient matches the discrete tail flux identically
    const std::size_t i = iF + j;
    const double r2 = glued.metric.rho[i] * glued.metric.rho[i];
    const double fm = 0.5 * (glued.metric.rho[i - 1] + glued.metric.rho[i]);
    const double fp = 0.5 * (glued.metric.rho[i] + glued.metric.rho[i + 1]);
    lo[j] = fm * fm / (r2 * ds * ds);
    up[j] = fp * fp / (r2 * ds * ds);
    di[j] = -(fm * fm + fp * fp) / (r2 * ds * ds) + out.kappa[i] / 8.0;
    rhs[j] = -out.kappa[i] / 8.0;
  }
  // Neumann at the core: zero flux through the inner cell face
  {
    const std::size_t i = iF;
    const double r2 = glued.metric.rho[i] * glued.metric.rho[i];
    const double fp = 0.5 * (glued.metric.rho[i] + glued.metric.rho[i + 1]);
    di[0] = -fp * fp / (r2 * ds * ds) + out.kappa[i] / 8.0;
    up[0] = fp * fp / (r2 * ds * ds);
    rhs[0] = -out.kappa[i] / 8.0;
  }
  // decay condition at the outer edge: the vacuum exterior solution is
  // w = A Q(rho) with Q(rho) = (1 - sqrt(1 - 2m/rho))/m (-> 1/rho for
  // m = 0), so impose the exact decaying ratio between the last two nodes
  auto Q_tail = [&](double p) {
    if (std::abs(glued.m_ext) < 1e-12 * std::max(1.0, glued.rho_b))
      return 1.0 / p;
    return (1.0 - std::sqrt(std::max(0.0, 1.0 - 2.0 * glued.m_ext / p))) /
           glued.m_ext;
  };
  {
    const double rf = 0.5 * (glued.metric.rho[n - 2] + glued.metric.rho[n - 1]);
    const double q_last = Q_tail(glued.metric.rho[n - 1]);
    const double q_prev = q_last + ds / (rf * rf);  // one discrete face inward
    lo[m - 1] = -q_last;
    di[m - 1] = q_prev;
    rhs[m - 1] = 0.0;
  }
  auto wi = solve_tridiagonal(lo, di, up, rhs);
  out.w.assign(n, 0.0);
  for (std::size_t j = 0; j < m; ++j) out.w[iF + j] = wi[j];
  for (std::size_t i = 0; i < iF; ++i) out.w[i] = wi[0];

  // tail fit against the exact vacuum basis, w = A Q(rho) + c0, over
  // rho in [r_far/2, r_far]; the constant absorbs any residual offset
  // from the discrete outer condition, A is the 1/rho coefficient
  const double rho_far = glued.metric.rho.back();
  {
    const double pm = 0.75 * rho_far;  // basis normalization point
    double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = iF; i < n; ++i) {
      const double p = glued.metric.rho[i];
      if (p < 0.5 * rho_far) continue;
      const double f1 = Q_tail(p) * pm, f2 = 1.0;
      s11 += f1 * f1;
      s12 += f1 * f2;
      s22 += f2 * f2;
      b1 += f1 * out.w[i];
      b2 += f2 * out.w[i];
    }
    const double det = s11 * s22 - s12 * s12;
    out.A_delta_tail = (b1 * s22 - b2 * s12) / det * pm;
  }

  // flux identity: 32 pi A_delta = Int kappa (1 + w) dV, evaluated with
  // the cell sum conjugate to the conservative stencil above
  {
    double acc = 0.0;
    std::vector<double> w6(n, 0.0);
    for (std::size_t i = iF; i + 1 < n; ++i) {
      const double p = glued.metric.rho[i];
      acc += out.kappa[i] * (1.0 + out.w[i]) * p * p * ds;
      w6[i] = std::pow(out.w[i], 6.0) * 4.0 * kPi * p * p;
    }
    out.A_delta_volume = acc / 8.0;
    out.L6_norm_w = std::pow(integrate(grid.nodes, w6), 1.0 / 6.0);
  }
  // absolute floor keeps noise-level coefficients (kappa at the
  // discretization floor) from tripping the relative comparison
  const double scale = std::max({std::abs(out.A_delta_tail),
                                 std::abs(out.A_delta_volume),
                                 1e-6 * std::max(1.0, glued.rho_b)});
  if (std::abs(out.A_delta_tail - out.A_delta_volume) >
      tol.mass_identity * scale)
    throw SolverError(
        "conformal asymptotic coefficient mismatch: tail " +
        std::to_string(out.A_delta_tail) + " vs volume " +
        std::to_string(out.A_delta_volume));

  // configured Sobolev-side bound on ||w||_6 (recorded, not asserted)
  {
    const double A = 4.0 * kPi * glued.rho_b * glued.rho_b;
    const double sob = cfg.sobolev_flat;  // a == 1 in the glued gauge
    const double A53 = std::pow(A, 5.0 / 3.0);
    // L^{6/5} norm of kappa/2 over the composite
    std::vector<double> k65(n, 0.0);
    for (std::size_t i = iF; i < n; ++i)
      k65[i] = std::pow(0.5 * out.kappa[i], 1.2) * 4.0 * kPi *
               glued.metric.rho[i] * glued.metric.rho[i];
    const double L65 = std::pow(integrate(grid.nodes, k65), 1.0 / 1.2);
    out.L6_bound = std::sqrt(
        3.0 * sob * sob *
        (cfg.c1 * cfg.c1 * glued.delta * A53 + L65 * L65));
  }

  // conformal scalar curvature: Rhat = (R + kappa) / u^4 at every node
  out.Rhat_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = iF; i < n; ++i) {
    const double u = 1.0 + out.w[i];
    out.Rhat_min = std::min(
        out.Rhat_min, (glued.R_profile[i] + out.kappa[i]) / std::pow(u, 4));
  }

  // Misner-Sharp tail fit of the conformal metric: m(rho_hat) = m + c/rho_hat
  const auto w_p = fd::derivative(grid.nodes, out.w);
  double t11 = 0, t12 = 0, t22 = 0, c1 = 0, c2 = 0;
  for (std::size_t i = iF; i + 1 < n; ++i) {
    const double p = glued.metric.rho[i];
    if (p < 0.5 * rho_far || p > 0.95 * rho_far) continue;
    const double u = 1.0 + out.w[i];
    const double rho_hat = u * u * p;
    const double drho_hat =
        (2.0 * u * w_p[i] * p + u * u * glued.rho_p[i]) / (u * u);
    const double ms = 0.5 * rho_hat * (1.0 - drho_hat * drho_hat);
    const double f1 = 1.0, f2 = 1.0 / rho_hat;
    t11 += f1 * f1;
    t12 += f1 * f2;
    t22 += f2 * f2;
    c1 += f1 * ms;
    c2 += f2 * ms;
  }
  const double dt = t11 * t22 - t12 * t12;
  out.m_adm_ghat = (c1 * t22 - c2 * t12) / dt;
  return out;
}

// ---------------------------------------------------------------------------
// Mass-chain assembly.

struct MassChainArtifacts {
  double m_LY = 0.0;                  // boundary Liu-Yau mass
  std::optional<double> m_WY;         // Wang-Yau bound when tau admissible
  double m_H_hull = 0.0;              // Hawking mass of the chosen hull
  double m_adm_gplus = 0.0;
  double A_delta = 0.0;
  double x_nu_integral = 0.0;
  double m_adm_ghat = 0.0;
};

inline VerdictReport verify_mass_chain(const MassChainArtifacts& art,
                                       double tol = 1e-4) {
  VerdictReport rep;
  rep.name = "mass_chain";
  const bool chain1 = art.m_adm_ghat >= art.m_H_hull - tol;
  const bool chain2 = art.m_adm_ghat <=
                      art.m_adm_gplus + art.x_nu_integral / (8.0 * kPi) + tol;
  const bool chain3 = art.m_LY >= art.m_H_hull - tol;
  const bool chain4 = !art.m_WY || *art.m_WY >= art.m_H_hull - tol;
  rep.holds = chain1 && chain2 && chain3 && chain4;
  rep.lhs = art.m_LY;
  rep.rhs = art.m_H_hull;
  rep.tolerance = tol;
  rep.values["m_LY"] = art.m_LY;
  rep.values["m_H_hull"] = art.m_H_hull;
  rep.values["m_adm_ghat"] = art.m_adm_ghat;
  rep.values["m_adm_gplus"] = art.m_adm_gplus;
  rep.values["A_delta"] = art.A_delta;
  rep.values["x_nu_integral"] = art.x_nu_integral;
  rep.values["adm_vs_hull_ok"] = chain1 ? 1.0 : 0.0;
  rep.values["adm_upper_bound_ok"] = chain2 ? 1.0 : 0.0;
  rep.values["liu_yau_vs_hull_ok"] = chain3 ? 1.0 : 0.0;
  if (art.m_WY) {
    rep.values["m_WY"] = *art.m_WY;
    rep.values["wang_yau_vs_hull_ok"] = chain4 ? 1.0 : 0.0;
  }
  rep.detail = rep.holds ? "quasi-local masses dominate the hull Hawking mass"
                         : "mass chain violated; see recorded values";
  return rep;
}

}  // namespace penrose

#endif  // PENROSE_GLUE_HPP_
