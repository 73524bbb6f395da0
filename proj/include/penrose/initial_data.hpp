#ifndef PENROSE_INITIAL_DATA_HPP_
#define PENROSE_INITIAL_DATA_HPP_

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "penrose/config.hpp"
#include "penrose/grid.hpp"
#include "penrose/report.hpp"

namespace penrose {

// Spherically symmetric metric samples:  g = a dr^2 + rho^2 dOmega^2.
struct RadialMetric {
  RadialGrid grid;
  std::vector<double> a;    // g_rr > 0
  std::vector<double> rho;  // area radius > 0

  void validate() const {
    if (a.size() != grid.count() || rho.size() != grid.count())
      throw DegenerateInputError("metric sample count mismatch");
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!(a[i] > 0.0) || !(rho[i] > 0.0) || !std::isfinite(a[i]) ||
          !std::isfinite(rho[i]))
        throw DegenerateInputError("metric components must be positive finite");
  }

  double area(std::size_t i) const { return 4.0 * kPi * rho[i] * rho[i]; }

  // Proper radial length of [r0, r1].
  double geodesic_length(double r0, double r1) const {
    std::vector<double> integrand(grid.count());
    for (std::size_t i = 0; i < grid.count(); ++i)
      integrand[i] = std::sqrt(a[i]);
    CubicInterpolant s(grid.nodes, integrand);
    // Composite Simpson on a refined uniform subgrid of [r0, r1].
    const std::size_t n = 4 * grid.count() + 1;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = r0 + (r1 - r0) * static_cast<double>(i) / static_cast<double>(n - 1);
      ys[i] = s(xs[i]);
    }
    return integrate(xs, ys);
  }
};

// Full initial data:  k = k_rr dr^2 + k_t rho^2 dOmega^2, so the mixed
// eigenvalues are k^r_r = k_rr / a and k^theta_theta = k_t.
struct SphericalInitialData {
  RadialMetric metric;
  std::vector<double> k_rr;
  std::vector<double> k_t;

  void validate() const {
    metric.validate();
    const std::size_t n = metric.grid.count();
    if (k_rr.size() != n || k_t.size() != n)
      throw DegenerateInputError("extrinsic curvature sample count mismatch");
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(k_rr[i]) || !std::isfinite(k_t[i]))
        throw DegenerateInputError("non-finite extrinsic curvature sample");
  }

  const RadialGrid& grid() const { return metric.grid; }

  double trace_k(std::size_t i) const {
    return k_rr[i] / metric.a[i] + 2.0 * k_t[i];
  }
  double norm_k_sq(std::size_t i) const {
    const double krr_mixed = k_rr[i] / metric.a[i];
    return krr_mixed * krr_mixed + 2.0 * k_t[i] * k_t[i];
  }
};

struct EnergyMomentum {
  std::vector<double> mu;   // energy density
  std::vector<double> J_r;  // radial momentum density (1-form component)
};

struct CurvatureProfile {
  std::vector<double> R;      // scalar curvature
  std::vector<double> K_rad;  // radial-tangential sectional curvature
  std::vector<double> K_tan;  // tangential-tangential sectional curvature

  double sectional_upper_bound() const {
    double c = 0.0;
    for (std::size_t i = 0; i < K_rad.size(); ++i)
      c = std::max(c, std::max(K_rad[i], K_tan[i]));
    return c;
  }
};

// Sectional curvatures of a dr^2/dOmega^2 warped metric and the scalar
// curvature from the consistency identity R = 2 (2 K_rad + K_tan).
inline CurvatureProfile curvature_profile(const RadialMetric& m) {
  m.validate();
  const auto& r = m.grid.nodes;
  const auto rho_p = fd::derivative(r, m.rho);
  const auto rho_pp = fd::second_derivative(r, m.rho);
  const auto a_p = fd::derivative(r, m.a);
  const std::size_t n = r.size();
  CurvatureProfile c;
  c.R.resize(n);
  c.K_rad.resize(n);
  c.K_tan.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = m.a[i], rho = m.rho[i];
    c.K_tan[i] = (1.0 - rho_p[i] * rho_p[i] / a) / (rho * rho);
    c.K_rad[i] = -(rho_pp[i] / a - rho_p[i] * a_p[i] / (2.0 * a * a)) / rho;
    c.R[i] = 2.0 * (2.0 * c.K_rad[i] + c.K_tan[i]);
    if (!std::isfinite(c.R[i]))
      throw DegenerateInputError("non-finite curvature");
  }
  return c;
}

// Energy and momentum density from the constraint equations,
//   16 pi mu = R + (Tr k)^2 - |k|^2,   8 pi J = div(k - (Tr k) g).
inline EnergyMomentum compute_constraints(const SphericalInitialData& data) {
  data.validate();
  const auto& r = data.grid().nodes;
  const std::size_t n = r.size();
  const auto curv = curvature_profile(data.metric);
  const auto rho_p = fd::derivative(r, data.metric.rho);
  const auto kt_p = fd::derivative(r, data.k_t);
  EnergyMomentum em;
  em.mu.resize(n);
  em.J_r.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double trk = data.trace_k(i);
    em.mu[i] =
        (curv.R[i] + trk * trk - data.norm_k_sq(i)) / (16.0 * kPi);
    // Radial component of div(k - (Tr k) g) for the diagonal ansatz.
    const double krr_mixed = data.k_rr[i] / data.metric.a[i];
    em.J_r[i] = (-2.0 * kt_p[i] +
                 2.0 * rho_p[i] / data.metric.rho[i] *
                     (krr_mixed - data.k_t[i])) /
                (8.0 * kPi);
    if (!std::isfinite(em.mu[i]) || !std::isfinite(em.J_r[i]))
      throw DegenerateInputError("non-finite constraint quantity");
  }
  return em;
}

// Dominant energy condition mu >= |J|_g at every node, up to -tol.
inline VerdictReport check_dec(const EnergyMomentum& em,
                               const SphericalInitialData& data,
                               double tol_dec = 1e-10) {
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i < em.mu.size(); ++i) {
    const double normJ = std::abs(em.J_r[i]) / std::sqrt(data.metric.a[i]);
    const double margin = em.mu[i] - normJ;
    if (margin < worst) {
      worst = margin;
      worst_i = i;
    }
  }
  VerdictReport v("dec", worst >= -tol_dec, worst, 0.0, tol_dec);
  v.values["min_margin"] = worst;
  v.values["worst_radius"] = data.grid().nodes[worst_i];
  return v;
}

// Geometry of the centered coordinate sphere at radius r.
struct SphereGeometry {
  double area = 0.0;
  double H = 0.0;        // outward mean curvature
  double tr_sigma_k = 0.0;
  double rho = 0.0;
};

namespace detail {

inline std::vector<double> mean_curvature_nodes(const RadialMetric& m) {
  const auto rho_p = fd::derivative(m.grid.nodes, m.rho);
  std::vector<double> H(m.grid.count());
  for (std::size_t i = 0; i < H.size(); ++i)
    H[i] = 2.0 * rho_p[i] / (m.rho[i] * std::sqrt(m.a[i]));
  return H;
}

}  // namespace detail

inline SphereGeometry sphere_geometry(const SphericalInitialData& data,
                                      double r) {
  if (!data.grid().contains(r))
    throw std::out_of_range("sphere_geometry: radius outside grid");
  const auto H_nodes = detail::mean_curvature_nodes(data.metric);
  CubicInterpolant rho_i(data.grid().nodes, data.metric.rho);
  CubicInterpolant H_i(data.grid().nodes, H_nodes);
  CubicInterpolant kt_i(data.grid().nodes, data.k_t);
  SphereGeometry s;
  s.rho = rho_i(r);
  s.area = 4.0 * kPi * s.rho * s.rho;
  s.H = H_i(r);
  s.tr_sigma_k = 2.0 * kt_i(r);
  return s;
}

// Admissibility of the domain boundary: untrapped (H > |Tr_S k|) at r_max
// and DEC throughout.
inline VerdictReport check_admissible_boundary(const SphericalInitialData& data,
                                               const Tolerances& tol = {}) {
  const auto em = compute_constraints(data);
  // DEC margin is polluted by O(dr^2) differentiation error on exact-vacuum
  // families; widen the slack to the discretization acceptance.
  const double dec_tol =
      std::max(tol.dec, tol.discretization(data.grid().spacing()));
  const auto dec = check_dec(em, data, dec_tol);
  const auto s = sphere_geometry(data, data.grid().r_max());
  const double untrapped_margin = s.H - std::abs(s.tr_sigma_k);
  VerdictReport v("admissible_boundary",
                  untrapped_margin > 0.0 && dec.holds, untrapped_margin, 0.0,
                  tol.dec);
  v.values["H_boundary"] = s.H;
  v.values["tr_sigma_k_boundary"] = s.tr_sigma_k;
  v.values["untrapped_margin"] = untrapped_margin;
  v.values["dec_min_margin"] = dec.values.at("min_margin");
  if (!dec.holds) v.detail = "DEC violated";
  else if (untrapped_margin <= 0.0) v.detail = "boundary not untrapped";
  return v;
}

}  // namespace penrose

#endif  // PENROSE_INITIAL_DATA_HPP_
