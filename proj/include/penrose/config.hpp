#ifndef PENROSE_CONFIG_HPP_
#define PENROSE_CONFIG_HPP_

#include <cmath>
#include <stdexcept>
#include <string>

namespace penrose {

inline constexpr double kPi = 3.14159265358979323846;

// Thrown when input data is degenerate (non-finite derivatives, vanishing
// metric components, grids too coarse to differentiate).
class DegenerateInputError : public std::runtime_error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : std::runtime_error(what) {}
};

// Thrown when an iterative solver fails to converge.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a stated mathematical precondition is violated
// (non-spacelike mean curvature vector, trapped boundary, ...).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what)
      : std::runtime_error(what) {}
};

// Thrown when a geometry cannot be handled by the restricted ansatz
// (non-embeddable profile, unclassifiable Rad geometry).
class UnsupportedGeometryError : public std::runtime_error {
 public:
  explicit UnsupportedGeometryError(const std::string& what)
      : std::runtime_error(what) {}
};

// Global numeric tolerances.  Values are defaults; scenario files may
// override individual entries.
struct Tolerances {
  double dec = 1e-10;              // slack for mu >= |J|
  double root_rel = 1e-10;         // relative tolerance of root bracketing
  double embed = 1e-6;             // embedding residual / Gauss defect
  double corner_match = 1e-8;      // mean-curvature match at the glue corner
  double mass_identity = 1e-4;     // relative A_delta / mass-identity agreement
  double scalar_floor = 1e-8;      // slack for pointwise R >= 0 checks
  // Discretization acceptance scales as disc_accept_coeff * dr^2.
  double disc_accept_coeff = 8.0;

  double discretization(double dr) const {
    return disc_accept_coeff * dr * dr;
  }
};

// Constants entering the admissibility audit and the Meeks-Yau area
// estimate.  The absolute constant C has no value in the literature; it is
// configuration-mandatory-visible in every report.
struct AuditConfig {
  double d1 = 1.0;
  double d2 = 1.0;
  double d3 = 1.0;
  double delta = 1e-2;             // smoothing tube parameter
  double c1 = 1.0;                 // curvature-bound constant; remeasured
                                   // per scenario by the smoothing stage
  double meeks_yau_C = 1.0;        // absolute constant of the area estimate
  // Flat-space Sobolev constant for ||w||_6^2 <= C ||grad w||_2^2,
  // sharp value 1 / (3 (pi/2)^(4/3)).
  double sobolev_flat = 1.0 / (3.0 * std::pow(kPi / 2.0, 4.0 / 3.0));
};

}  // namespace penrose

#endif  // PENROSE_CONFIG_HPP_
