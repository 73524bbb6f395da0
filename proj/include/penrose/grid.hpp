#ifndef PENROSE_GRID_HPP_
#define PENROSE_GRID_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "penrose/config.hpp"

namespace penrose {

/// Strictly increasing radial coordinate samples.
struct RadialGrid {
  std::vector<double> nodes;

  static RadialGrid uniform(double r_min, double r_max, std::size_t count) {
    if (count < 16) throw DegenerateInputError("grid count < 16");
    if (!(r_min >= 0.0) || !(r_max > r_min))
      throw DegenerateInputError("invalid grid bounds");
    RadialGrid g;
    g.nodes.resize(count);
    const double dr = (r_max - r_min) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
      g.nodes[i] = r_min + dr * static_cast<double>(i);
    g.nodes.back() = r_max;
    return g;
  }

  static RadialGrid from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 16) throw DegenerateInputError("grid count < 16");
    if (nodes.front() < 0.0) throw DegenerateInputError("r_min < 0");
    for (std::size_t i = 1; i < nodes.size(); ++i)
      if (!(nodes[i] > nodes[i - 1]))
        throw DegenerateInputError("grid nodes not strictly increasing");
    RadialGrid g;
    g.nodes = std::move(nodes);
    return g;
  }

  std::size_t count() const { return nodes.size(); }
  double r_min() const { return nodes.front(); }
  double r_max() const { return nodes.back(); }
  double spacing() const {
    return (r_max() - r_min()) / static_cast<double>(count() - 1);
  }
  bool contains(double r) const { return r >= r_min() && r <= r_max(); }

  // Index of the cell [nodes[i], nodes[i+1]] containing r.
  std::size_t locate(double r) const {
    if (!contains(r)) throw std::out_of_range("radius outside grid");
    auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
    std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    if (i > 0) --i;
    if (i >= count() - 1) i = count() - 2;
    return i;
  }
};

namespace fd {

// First derivative on a (possibly nonuniform) grid: centered 3-point in the
// interior, one-sided 3-point at the endpoints.  Second order throughout.
inline std::vector<double> derivative(std::span<const double> x,
                                      std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<double> d(n);
  auto three_point = [&](std::size_t i, std::size_t a, std::size_t b,
                         std::size_t c) {
    const double xa = x[a] - x[i], xb = x[b] - x[i], xc = x[c] - x[i];
    // Lagrange derivative at x[i] of the quadratic through (a, b, c).
    const double wa =
        ((0.0 - xb) + (0.0 - xc)) / ((xa - xb) * (xa - xc));
    const double wb =
        ((0.0 - xa) + (0.0 - xc)) / ((xb - xa) * (xb - xc));
    const double wc =
        ((0.0 - xa) + (0.0 - xb)) / ((xc - xa) * (xc - xb));
    return wa * y[a] + wb * y[b] + wc * y[c];
  };
  d[0] = three_point(0, 0, 1, 2);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i, i - 1, i, i + 1);
  d[n - 1] = three_point(n - 1, n - 3, n - 2, n - 1);
  for (double v : d)
    if (!std::isfinite(v))
      throw DegenerateInputError("non-finite derivative on grid");
  return d;
}

// Second derivative, same stencil layout.
inline std::vector<double> second_derivative(std::span<const double> x,
                                             std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<double> d(n);
  auto three_point = [&](std::size_t i, std::size_t a, std::size_t b,
                         std::size_t c) {
    const double xa = x[a] - x[i], xb = x[b] - x[i], xc = x[c] - x[i];
    const double wa = 2.0 / ((xa - xb) * (xa - xc));
    const double wb = 2.0 / ((xb - xa) * (xb - xc));
    const double wc = 2.0 / ((xc - xa) * (xc - xb));
    return wa * y[a] + wb * y[b] + wc * y[c];
  };
  d[0] = three_point(0, 0, 1, 2);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i, i - 1, i, i + 1);
  d[n - 1] = three_point(n - 1, n - 3, n - 2, n - 1);
  for (double v : d)
    if (!std::isfinite(v))
      throw DegenerateInputError("non-finite second derivative on grid");
  return d;
}

}  // namespace fd

// Cubic Hermite interpolant with finite-difference slopes (Catmull-Rom
// style on nonuniform grids).  Adequate for the O(dr^2) contracts here.
class CubicInterpolant {
 public:
  CubicInterpolant() = default;
  CubicInterpolant(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)), m_(fd::derivative(x_, y_)) {}

  double operator()(double r) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), r);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i > 0) --i;
    if (i >= x_.size() - 1) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double t = (r - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
  }

 private:
  std::vector<double> x_, y_, m_;
};

// Composite integral of samples over the full grid.  Simpson on uniform
// grids (even intervals handled by a 3/8 tail), trapezoid otherwise.
inline double integrate(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double h = x[1] - x[0];
  bool uniform = true;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (std::abs((x[i + 1] - x[i]) - h) > 1e-12 * std::abs(h)) {
      uniform = false;
      break;
    }
  if (!uniform || n < 5) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return s;
  }
  std::size_t m = n;                // number of points used by Simpson
  double tail = 0.0;
  if (n % 2 == 0) {                 // odd interval count: 3/8 rule on the tail
    m = n - 3;                      // Simpson covers [x_0, x_{n-4}]
    tail = 3.0 * h / 8.0 *
           (y[n - 4] + 3.0 * y[n - 3] + 3.0 * y[n - 2] + y[n - 1]);
  }
  double s = y[0] + y[m - 1];
  for (std::size_t i = 1; i + 1 < m; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * y[i];
  return s * h / 3.0 + tail;
}

// Thomas algorithm for a tridiagonal system; overwrites nothing.
// lower[0] and upper[n-1] are ignored.
inline std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n), x(n);
  double beta = diag[0];
  if (beta == 0.0) throw SolverError("tridiagonal pivot is zero");
  c[0] = upper[0] / beta;
  d[0] = rhs[0] / beta;
  for (std::size_t i = 1; i < n; ++i) {
    beta = diag[i] - lower[i] * c[i - 1];
    if (beta == 0.0) throw SolverError("tridiagonal pivot is zero");
    c[i] = (i + 1 < n) ? upper[i] / beta : 0.0;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

// Bisection refinement of a bracketed root to relative tolerance.
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double rel_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw SolverError("bisect: root not bracketed");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0 || (hi - lo) <= rel_tol * std::max(1.0, std::abs(mid)))
      return mid;
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace penrose

#endif  // PENROSE_GRID_HPP_
