#ifndef PENROSE_QUASILOCAL_HPP_
#define PENROSE_QUASILOCAL_HPP_

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "penrose/config.hpp"
#include "penrose/grid.hpp"
#include "penrose/initial_data.hpp"
#include "penrose/report.hpp"

namespace penrose {

using ThetaFn = std::function<double(double)>;

// Five-point central derivative of a smooth callable; step chosen so the
// truncation error stays near roundoff.
inline double dtheta(const ThetaFn& f, double x, double h = 1e-3) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) /
         (12.0 * h);
}

// Boundary 2-surface record.  Round surfaces carry constant scalars;
// axisymmetric data supplies smooth theta-profiles as callables
// (theta in (0, pi); profiles must extend smoothly past the poles).
struct BoundarySurface {
  bool is_round = true;
  double rho_b = 1.0;
  double H = 0.0;        // mean curvature (round)
  double trk = 0.0;      // Tr_Sigma k (round)
  // Axisymmetric induced metric sigma = sigma_tt dtheta^2 + sigma_pp dphi^2
  // and profiles; used when is_round is false.
  ThetaFn sigma_tt, sigma_pp, H_prof, trk_prof, alpha_e3;
  std::size_t theta_count = 512;

  static BoundarySurface round(double rho_b, double H, double trk) {
    BoundarySurface b;
    b.is_round = true;
    b.rho_b = rho_b;
    b.H = H;
    b.trk = trk;
    return b;
  }

  double area() const { return 4.0 * kPi * rho_b * rho_b; }
};

// Boundary sphere of a spherically symmetric data set.
inline BoundarySurface boundary_surface(const SphericalInitialData& data) {
  const auto s = sphere_geometry(data, data.grid().r_max());
  return BoundarySurface::round(s.rho, s.H, s.tr_sigma_k);
}

// ---------------------------------------------------------------------------
// Hawking mass

inline MassValue hawking_mass(double area, double H_const,
                              const std::string& src = {}) {
  const double willmore = H_const * H_const * area;
  MassValue m;
  m.kind = MassKind::hawking;
  m.value = std::sqrt(area / (16.0 * kPi)) * (1.0 - willmore / (16.0 * kPi));
  m.inputs = src;
  return m;
}

// Axisymmetric profile variant: integrates H^2 over the surface.
inline MassValue hawking_mass(const ThetaFn& sigma_tt, const ThetaFn& sigma_pp,
                              const ThetaFn& H_prof, std::size_t n_theta,
                              const std::string& src = {}) {
  std::vector<double> th(n_theta), dA(n_theta), h2(n_theta);
  for (std::size_t i = 0; i < n_theta; ++i) {
    th[i] = kPi * static_cast<double>(i) / static_cast<double>(n_theta - 1);
    const double w = std::sqrt(sigma_tt(th[i]) * sigma_pp(th[i]));
    dA[i] = 2.0 * kPi * w;
    const double H = H_prof(th[i]);
    h2[i] = dA[i] * H * H;
  }
  const double area = integrate(th, dA);
  const double willmore = integrate(th, h2);
  MassValue m;
  m.kind = MassKind::hawking;
  m.value = std::sqrt(area / (16.0 * kPi)) * (1.0 - willmore / (16.0 * kPi));
  m.inputs = src;
  return m;
}

// ---------------------------------------------------------------------------
// Isometric embedding of an axisymmetric metric E dtheta^2 + G dphi^2 as a
// surface of revolution in R^3.

struct EmbeddingResult {
  std::vector<double> theta;
  std::vector<double> s;       // cylindrical radius profile
  std::vector<double> z;       // height profile
  std::vector<double> H0;      // mean curvature of the embedded surface
  double gauss_defect = 0.0;   // |int K dA - 4 pi|
  double metric_residual = 0.0;
  double area = 0.0;

  // H0 evaluated by cubic interpolation in theta.
  double H0_at(double th) const {
    CubicInterpolant h(theta, H0);
    return h(th);
  }
};

inline EmbeddingResult embed_surface_of_revolution(const ThetaFn& E,
                                                   const ThetaFn& G,
                                                   std::size_t n_theta = 512,
                                                   double tol_embed = 1e-6) {
  EmbeddingResult out;
  out.theta.resize(n_theta);
  out.s.resize(n_theta);
  out.z.resize(n_theta);
  out.H0.resize(n_theta);
  std::vector<double> zp(n_theta), kdA(n_theta), dA(n_theta);

  // s = sqrt(G) is not smooth at the poles, but G is (even extension), so
  // differentiate G and use s' = G'/(2s), s'' = G''/(2s) - G'^2/(4 s^3).
  auto s_of = [&](double th) { return std::sqrt(std::max(G(th), 0.0)); };
  auto sprime = [&](double th) {
    const double s = s_of(th);
    if (s > 1e-9) return dtheta(G, th) / (2.0 * s);
    const double gpp = dtheta([&](double x) { return dtheta(G, x); }, th, 2e-3);
    const double lim = std::sqrt(std::max(gpp, 0.0) / 2.0);
    return (th < kPi / 2.0) ? lim : -lim;
  };
  auto zprime = [&](double th) {
    const double sp = sprime(th);
    return std::sqrt(std::max(E(th) - sp * sp, 0.0));
  };
  for (std::size_t i = 0; i < n_theta; ++i)
    out.theta[i] = kPi * static_cast<double>(i) / static_cast<double>(n_theta - 1);

  for (std::size_t i = 0; i < n_theta; ++i) {
    const double th = out.theta[i];
    out.s[i] = s_of(th);
    const double Eth = E(th);
    const bool pole = (i == 0 || i + 1 == n_theta || out.s[i] < 1e-9);
    const double sp = sprime(th);
    const double rad = Eth - sp * sp;
    if (rad < -tol_embed * std::max(1.0, Eth))
      throw UnsupportedGeometryError(
          "profile not embeddable as a revolution graph (E - s'^2 < 0)");
    zp[i] = std::sqrt(std::max(rad, 0.0));
    if (pole) {
      // s -> 0 and z' -> 0 here; the area and curvature integrands vanish
      // and H0 is filled by extrapolation below.
      zp[i] = 0.0;
      dA[i] = 0.0;
      kdA[i] = 0.0;
      out.H0[i] = 0.0;
      continue;
    }
    const double gp = dtheta(G, th);
    const double gpp = dtheta([&](double x) { return dtheta(G, x); }, th, 2e-3);
    const double spp =
        gpp / (2.0 * out.s[i]) -
        gp * gp / (4.0 * out.s[i] * out.s[i] * out.s[i]);
    const double Ep = dtheta(E, th);
    const double zpp = (zp[i] > 1e-12)
                           ? (Ep - 2.0 * sp * spp) / (2.0 * zp[i])
                           : 0.0;
    const double e32 = std::pow(Eth, 1.5);
    const double kap1 = (sp * zpp - zp[i] * spp) / e32;
    const double kap2 = zp[i] / (out.s[i] * std::sqrt(Eth));
    out.H0[i] = kap1 + kap2;
    dA[i] = 2.0 * kPi * out.s[i] * std::sqrt(Eth);
    kdA[i] = 2.0 * kPi * kap1 * zp[i];  // K dA = kap1 kap2 s sqrt(E) dtheta
  }
  // Pole H0 by quadratic extrapolation (the umbilic limit above is only
  // first order on a discrete grid).
  out.H0[0] = 3.0 * out.H0[1] - 3.0 * out.H0[2] + out.H0[3];
  out.H0[n_theta - 1] =
      3.0 * out.H0[n_theta - 2] - 3.0 * out.H0[n_theta - 3] + out.H0[n_theta - 4];

  // Reconstruct z by cumulative Simpson of z' on cell midpoints.
  out.z[0] = 0.0;
  for (std::size_t i = 1; i < n_theta; ++i) {
    const double a = out.theta[i - 1], b = out.theta[i];
    const double mid = 0.5 * (a + b);
    out.z[i] = out.z[i - 1] +
               (b - a) / 6.0 * (zp[i - 1] + 4.0 * zprime(mid) + zp[i]);
  }

  // Metric round trip: re-differentiate the reconstructed embedding.
  double resid = 0.0;
  for (std::size_t i = 2; i + 2 < n_theta; ++i) {
    // 5-point first derivative of z samples
    const double h = out.theta[1] - out.theta[0];
    const double zp5 = (-out.z[i + 2] + 8 * out.z[i + 1] - 8 * out.z[i - 1] +
                        out.z[i - 2]) /
                       (12.0 * h);
    const double sp = sprime(out.theta[i]);
    const double Eth = E(out.theta[i]);
    resid = std::max(resid, std::abs(sp * sp + zp5 * zp5 - Eth) /
                                std::max(1.0, Eth));
  }
  out.metric_residual = resid;
  out.area = integrate(out.theta, dA);
  out.gauss_defect = std::abs(integrate(out.theta, kdA) - 4.0 * kPi);
  if (out.gauss_defect > tol_embed * 4.0 * kPi * 10.0)
    throw UnsupportedGeometryError("embedding quality: Gauss defect " +
                                   std::to_string(out.gauss_defect));
  return out;
}

// ---------------------------------------------------------------------------
// Liu-Yau mass

inline MassValue liu_yau_mass(const BoundarySurface& b,
                              const std::string& src = {}) {
  MassValue m;
  m.kind = MassKind::liu_yau;
  m.inputs = src;
  if (b.is_round) {
    const double h2 = b.H * b.H - b.trk * b.trk;
    if (h2 <= 0.0)
      throw PreconditionError("mean curvature vector is not spacelike");
    const double H0 = 2.0 / b.rho_b;  // closed form for the round case
    m.value = b.area() / (8.0 * kPi) * (H0 - std::sqrt(h2));
    return m;
  }
  auto emb = embed_surface_of_revolution(b.sigma_tt, b.sigma_pp, b.theta_count);
  std::vector<double> th(b.theta_count), integ(b.theta_count);
  for (std::size_t i = 0; i < b.theta_count; ++i) {
    th[i] = kPi * static_cast<double>(i) / static_cast<double>(b.theta_count - 1);
    const double H = b.H_prof(th[i]);
    const double T = b.trk_prof(th[i]);
    const double h2 = H * H - T * T;
    if (h2 <= 0.0)
      throw PreconditionError("mean curvature vector is not spacelike");
    const double w = std::sqrt(b.sigma_tt(th[i]) * b.sigma_pp(th[i]));
    integ[i] = 2.0 * kPi * w * (emb.H0[i] - std::sqrt(h2));
  }
  m.value = integrate(th, integ) / (8.0 * kPi);
  return m;
}

// ---------------------------------------------------------------------------
// Wang-Yau energy for a time function tau(theta) on an axisymmetric
// boundary.  The normal-bundle frame is the rapidity boost of the data
// frame fixed by <H, e4> = -Lap tau / sqrt(1 + |grad tau|^2).

struct WangYauGeometry {
  ThetaFn sigma_tt, sigma_pp;    // sigma
  ThetaFn H, trk, alpha_e3;      // data profiles (alpha: theta component)
  ThetaFn tau;
  std::size_t theta_count = 512;

  ThetaFn hat_E() const {
    return [this](double th) {
      const double tp = dtheta(tau, th);
      return sigma_tt(th) + tp * tp;
    };
  }

  double grad_tau_sq(double th) const {
    const double tp = dtheta(tau, th);
    return tp * tp / sigma_tt(th);
  }

  double laplacian_tau(double th) const {
    auto flux = [this](double x) {
      const double w = std::sqrt(sigma_tt(x) * sigma_pp(x));
      return w / sigma_tt(x) * dtheta(tau, x);
    };
    const double w = std::sqrt(sigma_tt(th) * sigma_pp(th));
    return dtheta(flux, th) / w;
  }

  // Rapidity of the frame boost at theta.
  double rapidity(double th) const {
    const double H_ = H(th), T = trk(th);
    const double h2 = H_ * H_ - T * T;
    if (h2 <= 0.0 || H_ <= 0.0)
      throw PreconditionError(
          "frame condition unsolvable: mean curvature vector not spacelike");
    const double q = -laplacian_tau(th) / std::sqrt(1.0 + grad_tau_sq(th));
    return std::asinh(q / std::sqrt(h2)) - std::atanh(T / H_);
  }

  // Generalized mean curvature of the physical surface.
  double frak_h(double th) const {
    const double beta = rapidity(th);
    const double gt2 = grad_tau_sq(th);
    const double tp = dtheta(tau, th);
    const double beta_p = dtheta([this](double x) { return rapidity(x); }, th);
    const double boost =
        H(th) * std::cosh(beta) + trk(th) * std::sinh(beta);
    // connection 1-form in the boosted frame; the sign of the d(beta)
    // contribution is fixed by the requirement that boosted observers in
    // flat data carry zero energy.
    const double alpha_term = (alpha_e3(th) + beta_p) * tp / sigma_tt(th);
    return std::sqrt(1.0 + gt2) * boost - alpha_term;
  }
};

inline MassValue wang_yau_energy(const WangYauGeometry& g,
                                 const std::string& src = {}) {
  auto emb =
      embed_surface_of_revolution(g.hat_E(), g.sigma_pp, g.theta_count);
  const std::size_t n = g.theta_count;
  std::vector<double> th(n), integ(n);
  for (std::size_t i = 0; i < n; ++i) {
    th[i] = kPi * static_cast<double>(i) / static_cast<double>(n - 1);
    if (i == 0 || i + 1 == n) {
      integ[i] = 0.0;  // area weight vanishes on the axis
      continue;
    }
    const double gt2 = g.grad_tau_sq(th[i]);
    const double frak_h0 = std::sqrt(1.0 + gt2) * emb.H0[i];
    const double w = std::sqrt(g.sigma_tt(th[i]) * g.sigma_pp(th[i]));
    integ[i] = 2.0 * kPi * w * (frak_h0 - g.frak_h(th[i]));
  }
  MassValue m;
  m.kind = MassKind::wang_yau_energy;
  m.value = integrate(th, integ) / (8.0 * kPi);
  m.inputs = src;
  return m;
}

// Convenience: Wang-Yau geometry of a round data boundary with tau(theta).
inline WangYauGeometry wang_yau_geometry(const BoundarySurface& b,
                                         const ThetaFn& tau) {
  WangYauGeometry g;
  if (b.is_round) {
    const double rb2 = b.rho_b * b.rho_b;
    g.sigma_tt = [rb2](double) { return rb2; };
    g.sigma_pp = [rb2](double th) {
      const double s = std::sin(th);
      return rb2 * s * s;
    };
    const double H = b.H, T = b.trk;
    g.H = [H](double) { return H; };
    g.trk = [T](double) { return T; };
    g.alpha_e3 = [](double) { return 0.0; };
  } else {
    g.sigma_tt = b.sigma_tt;
    g.sigma_pp = b.sigma_pp;
    g.H = b.H_prof;
    g.trk = b.trk_prof;
    g.alpha_e3 = b.alpha_e3 ? b.alpha_e3 : ThetaFn([](double) { return 0.0; });
  }
  g.theta_count = b.theta_count;
  g.tau = tau;
  return g;
}

inline MassValue wang_yau_energy(const BoundarySurface& b, const ThetaFn& tau,
                                 const std::string& src = {}) {
  // tau == 0 reduces exactly to Liu-Yau; route through the closed form so
  // the identity holds to machine precision on round boundaries.
  bool tau_zero = true;
  for (int i = 0; i <= 16; ++i) {
    if (std::abs(tau(kPi * i / 16.0)) > 0.0) {
      tau_zero = false;
      break;
    }
  }
  if (tau_zero) {
    MassValue m = liu_yau_mass(b, src);
    m.kind = MassKind::wang_yau_energy;
    return m;
  }
  return wang_yau_energy(wang_yau_geometry(b, tau), src);
}

// Gauss curvature of an axisymmetric metric E dtheta^2 + G dphi^2.
inline double gauss_curvature_axisym(const ThetaFn& E, const ThetaFn& G,
                                     double th) {
  auto w = [&](double x) { return std::sqrt(E(x) * G(x)); };
  auto gp_over_w = [&](double x) { return dtheta(G, x) / w(x); };
  return -dtheta(gp_over_w, th) / (2.0 * w(th));
}

// Convexity condition (1 + |grad tau|^2) K_hat > 0, untrapped boundary,
// and positive generalized mean curvature.
inline VerdictReport check_tau_admissible(const BoundarySurface& b,
                                          const ThetaFn& tau) {
  auto g = wang_yau_geometry(b, tau);
  double min_conv = std::numeric_limits<double>::infinity();
  double min_frakh = std::numeric_limits<double>::infinity();
  const std::size_t n = b.theta_count;
  bool spacelike = true;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double th = kPi * static_cast<double>(i) / static_cast<double>(n - 1);
    const double K = gauss_curvature_axisym(g.hat_E(), g.sigma_pp, th);
    min_conv = std::min(min_conv, (1.0 + g.grad_tau_sq(th)) * K);
    const double H = g.H(th), T = g.trk(th);
    if (H * H - T * T <= 0.0 || H <= 0.0) {
      spacelike = false;
      break;
    }
    min_frakh = std::min(min_frakh, g.frak_h(th));
  }
  const bool ok = spacelike && min_conv > 0.0 && min_frakh > 0.0;
  VerdictReport v("tau_admissible", ok, std::min(min_conv, min_frakh), 0.0,
                  0.0);
  v.values["min_convexity"] = min_conv;
  v.values["min_generalized_H"] = min_frakh;
  v.values["untrapped"] = spacelike ? 1.0 : 0.0;
  if (!ok)
    v.detail = !spacelike            ? "boundary not untrapped"
               : (min_conv <= 0.0)   ? "convexity condition fails"
                                     : "generalized mean curvature not positive";
  return v;
}

// ---------------------------------------------------------------------------
// Parametric Wang-Yau minimization over Legendre tau families.

inline double legendre_p(int l, double x) {
  double p0 = 1.0, p1 = x;
  if (l == 0) return p0;
  if (l == 1) return p1;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

struct TauFamilySpec {
  int degree = 2;            // Legendre degrees 1..degree
  double coeff_bound = 0.5;  // box |c_l| <= coeff_bound * rho_b
  int scan_points = 7;       // coarse scan per axis before line search
};

struct FamilyMinimum {
  MassValue energy;
  std::vector<double> coeffs;
  int evaluations = 0;
  std::vector<std::pair<std::vector<double>, double>> trace;
};

inline FamilyMinimum wang_yau_mass_over_family(const BoundarySurface& b,
                                               const TauFamilySpec& fam,
                                               const std::string& src = {}) {
  auto tau_of = [&](const std::vector<double>& c) {
    return ThetaFn([&b, c](double th) {
      double t = 0.0;
      const double x = std::cos(th);
      for (std::size_t l = 0; l < c.size(); ++l)
        t += c[l] * legendre_p(static_cast<int>(l) + 1, x);
      return t * b.rho_b;
    });
  };
  FamilyMinimum best;
  best.coeffs.assign(static_cast<std::size_t>(fam.degree), 0.0);
  int evals = 0;
  auto energy_of = [&](const std::vector<double>& c) -> double {
    ++evals;
    auto tau = tau_of(c);
    if (!check_tau_admissible(b, tau).holds)
      return std::numeric_limits<double>::infinity();
    return wang_yau_energy(b, tau, src).value;
  };
  double cur = energy_of(best.coeffs);
  if (!std::isfinite(cur))
    throw PreconditionError("no admissible observer in the family box");
  best.trace.push_back({best.coeffs, cur});

  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (int axis = 0; axis < fam.degree; ++axis) {
      auto f1 = [&](double c) {
        auto cs = best.coeffs;
        cs[static_cast<std::size_t>(axis)] = c;
        return energy_of(cs);
      };
      // coarse scan for a bracket
      double lo = -fam.coeff_bound, hi = fam.coeff_bound;
      double best_c = best.coeffs[static_cast<std::size_t>(axis)];
      double best_v = cur;
      for (int i = 0; i < fam.scan_points; ++i) {
        const double c = lo + (hi - lo) * i / (fam.scan_points - 1);
        const double v = f1(c);
        if (v < best_v) {
          best_v = v;
          best_c = c;
        }
      }
      // golden-section refinement around the scan winner, kept inside box
      const double span = (hi - lo) / (fam.scan_points - 1);
      double a = std::max(lo, best_c - span), d = std::min(hi, best_c + span);
      double x1 = d - gr * (d - a), x2 = a + gr * (d - a);
      double v1 = f1(x1), v2 = f1(x2);
      for (int it = 0; it < 24; ++it) {
        if (v1 < v2) {
          d = x2;
          x2 = x1;
          v2 = v1;
          x1 = d - gr * (d - a);
          v1 = f1(x1);
        } else {
          a = x1;
          x1 = x2;
          v1 = v2;
          x2 = a + gr * (d - a);
          v2 = f1(x2);
        }
      }
      const double cand = (v1 < v2) ? x1 : x2;
      const double cand_v = std::min(v1, v2);
      if (cand_v < cur) {
        cur = cand_v;
        best.coeffs[static_cast<std::size_t>(axis)] = cand;
        best.trace.push_back({best.coeffs, cur});
      }
    }
  }
  best.energy.kind = MassKind::wang_yau_energy;
  best.energy.value = cur;
  best.energy.inputs = src;
  best.evaluations = evals;
  return best;
}

}  // namespace penrose

#endif  // PENROSE_QUASILOCAL_HPP_
