#ifndef PENROSE_HULLS_HPP_
#define PENROSE_HULLS_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "penrose/config.hpp"
#include "penrose/grid.hpp"
#include "penrose/initial_data.hpp"

namespace penrose {

// Competitors are restricted to centered spheres throughout (symmetric
// rearrangement); every consumer of these results inherits that assumption.

struct HullResult {
  double r_inner = 0.0;
  double r_hull = 0.0;
  bool jumped = false;
  double area_inner = 0.0;
  double area_hull = 0.0;
};

enum class MotsKind { future, past, minimal };

inline const char* mots_kind_name(MotsKind k) {
  switch (k) {
    case MotsKind::future: return "future";
    case MotsKind::past: return "past";
    default: return "minimal";
  }
}

struct MotsRecord {
  double radius = 0.0;
  MotsKind kind = MotsKind::minimal;
  double theta_plus_residual = 0.0;
};

namespace detail {

// Interpolated sphere area A(r) = 4 pi rho(r)^2.
inline std::function<double(double)> area_interpolant(const RadialMetric& m) {
  CubicInterpolant rho(m.grid.nodes, m.rho);
  return [rho](double r) {
    const double p = rho(r);
    return 4.0 * kPi * p * p;
  };
}

inline double area_slack(const RadialMetric& m, double r,
                         const Tolerances& tol) {
  CubicInterpolant rho(m.grid.nodes, m.rho);
  const double p = rho(r);
  const double dr = m.grid.spacing();
  return tol.disc_accept_coeff * dr * dr * 4.0 * kPi * p * p;
}

}  // namespace detail

// A(s) >= A(r) - tol_area for every grid node s >= r.
inline bool is_outward_minimizing(const RadialMetric& m, double r,
                                  const Tolerances& tol = {}) {
  m.validate();
  if (!m.grid.contains(r)) throw std::out_of_range("radius outside grid");
  auto A = detail::area_interpolant(m);
  const double A_r = A(r);
  const double slack = detail::area_slack(m, r, tol);
  for (std::size_t i = 0; i < m.grid.count(); ++i) {
    if (m.grid.nodes[i] < r) continue;
    if (m.area(i) < A_r - slack) return false;
  }
  return true;
}

// Outermost sphere attaining inf_{s >= r} A(s).
inline HullResult strictly_minimizing_hull(const RadialMetric& m, double r,
                                           const Tolerances& tol = {}) {
  m.validate();
  if (!m.grid.contains(r)) throw std::out_of_range("radius outside grid");
  auto A = detail::area_interpolant(m);
  HullResult h;
  h.r_inner = r;
  h.area_inner = A(r);

  // Scan outside-in; replace only on strict improvement so plateaus of the
  // minimum resolve to their outermost point.
  const double tol_eq = 1e-10 * h.area_inner;
  double best_r = m.grid.r_max();
  double best_A = A(best_r);
  std::size_t best_i = m.grid.count() - 1;
  for (std::size_t i = m.grid.count(); i-- > 0;) {
    if (m.grid.nodes[i] < r) break;
    if (m.area(i) < best_A - tol_eq) {
      best_A = m.area(i);
      best_r = m.grid.nodes[i];
      best_i = i;
    }
  }
  if (h.area_inner < best_A - tol_eq) {
    best_A = h.area_inner;
    best_r = r;
  } else if (best_i > 0 && best_i + 1 < m.grid.count() &&
             m.grid.nodes[best_i] > r) {
    // interior node minimum: refine between the neighbours
    double a = std::max(r, m.grid.nodes[best_i - 1]);
    double b = m.grid.nodes[best_i + 1];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = A(x1), f2 = A(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = A(x1);
      } else {
        a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = A(x2);
      }
    }
    const double xr = (f1 < f2) ? x1 : x2;
    const double Ar = A(xr);
    // accept only strict improvement, so re-hulling from the result is a
    // fixed point
    if (Ar < best_A - tol_eq) {
      best_A = Ar;
      best_r = xr;
    }
  }
  h.r_hull = best_r;
  h.area_hull = best_A;
  h.jumped = best_r > r + 1e-12 * std::max(1.0, r);
  return h;
}

namespace detail {

// Outermost sign-change root of a sampled radial profile, refined by
// bisection on its cubic interpolant.  Radii below r_floor are ignored.
inline std::optional<double> outermost_root(const RadialGrid& g,
                                            const std::vector<double>& f,
                                            double rel_tol = 1e-10) {
  CubicInterpolant fi(g.nodes, f);
  for (std::size_t i = g.count() - 1; i-- > 0;) {
    if (f[i] == 0.0) return g.nodes[i];
    if (f[i] * f[i + 1] < 0.0)
      return bisect([&fi](double r) { return fi(r); }, g.nodes[i],
                    g.nodes[i + 1], rel_tol);
  }
  return std::nullopt;
}

}  // namespace detail

// Outermost marginally trapped sphere: root of theta_plus = H - Tr_S k
// (future) or theta_minus = H + Tr_S k (past); coincident roots on
// time-symmetric data are classified as minimal.
inline std::optional<MotsRecord> find_outermost_mots(
    const SphericalInitialData& data, const Tolerances& tol = {}) {
  data.validate();
  const auto H = detail::mean_curvature_nodes(data.metric);
  const std::size_t n = data.grid().count();
  std::vector<double> theta_p(n), theta_m(n);
  for (std::size_t i = 0; i < n; ++i) {
    theta_p[i] = H[i] - 2.0 * data.k_t[i];
    theta_m[i] = H[i] + 2.0 * data.k_t[i];
  }
  const auto rp = detail::outermost_root(data.grid(), theta_p, tol.root_rel);
  const auto rm = detail::outermost_root(data.grid(), theta_m, tol.root_rel);
  if (!rp && !rm) return std::nullopt;
  MotsRecord rec;
  if (rp && rm) {
    const double scale = std::max(1.0, std::max(*rp, *rm));
    if (std::abs(*rp - *rm) < 1e-8 * scale) {
      rec.radius = 0.5 * (*rp + *rm);
      rec.kind = MotsKind::minimal;
    } else if (*rp > *rm) {
      rec.radius = *rp;
      rec.kind = MotsKind::future;
    } else {
      rec.radius = *rm;
      rec.kind = MotsKind::past;
    }
  } else if (rp) {
    rec.radius = *rp;
    rec.kind = MotsKind::future;
  } else {
    rec.radius = *rm;
    rec.kind = MotsKind::past;
  }
  CubicInterpolant Hi(data.grid().nodes, H);
  CubicInterpolant kti(data.grid().nodes, data.k_t);
  rec.theta_plus_residual = Hi(rec.radius) - 2.0 * kti(rec.radius);
  return rec;
}

// Outermost H = 0 sphere that is also outward minimizing.
inline std::optional<MotsRecord> find_outermost_minimal(
    const RadialMetric& m, const Tolerances& tol = {}) {
  m.validate();
  const auto H = detail::mean_curvature_nodes(m);
  CubicInterpolant Hi(m.grid.nodes, H);
  // walk roots outermost-first
  for (std::size_t i = m.grid.count() - 1; i-- > 0;) {
    double root = std::numeric_limits<double>::quiet_NaN();
    if (H[i] == 0.0)
      root = m.grid.nodes[i];
    else if (H[i] * H[i + 1] < 0.0)
      root = bisect([&Hi](double r) { return Hi(r); }, m.grid.nodes[i],
                    m.grid.nodes[i + 1], tol.root_rel);
    if (!std::isfinite(root)) continue;
    if (is_outward_minimizing(m, root, tol)) {
      MotsRecord rec;
      rec.radius = root;
      rec.kind = MotsKind::minimal;
      rec.theta_plus_residual = Hi(root);
      return rec;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rad of the domain: largest radius of a disc-free ball, from the two model
// classifications (round ball / capped cylinder).

struct RadResult {
  double value = 0.0;
  std::string classification;  // "ball_like" | "cylinder_capped"
  double plateau_R = 0.0;      // cylinder radius (cylinder_capped only)
  double plateau_half_length = 0.0;
};

inline RadResult rad(const RadialMetric& m) {
  m.validate();
  const auto rho_p = fd::derivative(m.grid.nodes, m.rho);
  const std::size_t n = m.grid.count();
  // gauge-invariant slope d rho / d sigma (sigma = proper distance), so the
  // classification does not depend on the radial chart
  std::vector<double> slope(n);
  for (std::size_t i = 0; i < n; ++i) slope[i] = rho_p[i] / std::sqrt(m.a[i]);
  // plateau detection from the inner end
  std::size_t plateau_end = 0;
  while (plateau_end < n && std::abs(slope[plateau_end]) < 1e-3)
    ++plateau_end;
  for (std::size_t i = plateau_end; i < n; ++i)
    if (slope[i] < -1e-3)
      throw UnsupportedGeometryError(
          "profile is neither ball-like nor cylinder-capped");
  RadResult out;
  // plateau_end == n means the whole domain is an (uncapped) tube; the
  // angular cap still bounds the ball radius
  if (plateau_end >= 8) {
    out.classification = "cylinder_capped";
    out.plateau_R = m.rho[plateau_end / 2];
    const double L_full = m.geodesic_length(
        m.grid.r_min(), m.grid.nodes[std::min(plateau_end, n - 1)]);
    out.plateau_half_length = 0.5 * L_full;
    out.value = std::min(kPi * out.plateau_R / 2.0, out.plateau_half_length);
  } else {
    out.classification = "ball_like";
    out.value = 0.5 * m.geodesic_length(m.grid.r_min(), m.grid.r_max());
  }
  return out;
}

}  // namespace penrose

#endif  // PENROSE_HULLS_HPP_
