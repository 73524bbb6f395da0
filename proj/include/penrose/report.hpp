#ifndef PENROSE_REPORT_HPP_
#define PENROSE_REPORT_HPP_

#include <map>
#include <string>
#include <utility>

namespace penrose {

// Structured outcome of an inequality or criterion check.  Every recorded
// quantity carries the tolerance it was compared against so reports are
// self-describing.
struct VerdictReport {
  std::string name;
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  std::string detail;
  std::map<std::string, double> values;  // named intermediate quantities

  VerdictReport() = default;
  VerdictReport(std::string name_, bool holds_, double lhs_, double rhs_,
                double tol_, std::string detail_ = {})
      : name(std::move(name_)),
        holds(holds_),
        lhs(lhs_),
        rhs(rhs_),
        tolerance(tol_),
        detail(std::move(detail_)) {}

  double margin() const { return lhs - rhs; }
};

// Quasi-local mass value with provenance.
enum class MassKind { hawking, liu_yau, wang_yau_energy, shi_tam, m_star };

struct MassValue {
  double value = 0.0;
  MassKind kind = MassKind::hawking;
  std::string inputs;  // provenance token (scenario/surface description)
};

}  // namespace penrose

#endif  // PENROSE_REPORT_HPP_
