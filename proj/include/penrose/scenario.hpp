#ifndef PENROSE_SCENARIO_HPP_
#define PENROSE_SCENARIO_HPP_

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "penrose/config.hpp"
#include "penrose/initial_data.hpp"

namespace penrose {

enum class Family {
  flat,
  schwarzschild,
  schwarzschild_isotropic,
  painleve_gullstrand,
  constant_density_star,
  dumbbell,
  cylinder,
  custom_table,
};

inline std::string family_name(Family f) {
  switch (f) {
    case Family::flat: return "flat";
    case Family::schwarzschild: return "schwarzschild";
    case Family::schwarzschild_isotropic: return "schwarzschild_isotropic";
    case Family::painleve_gullstrand: return "painleve_gullstrand";
    case Family::constant_density_star: return "constant_density_star";
    case Family::dumbbell: return "dumbbell";
    case Family::cylinder: return "cylinder";
    case Family::custom_table: return "custom_table";
  }
  return "?";
}

inline std::optional<Family> family_from_name(const std::string& s) {
  for (Family f :
       {Family::flat, Family::schwarzschild, Family::schwarzschild_isotropic,
        Family::painleve_gullstrand, Family::constant_density_star,
        Family::dumbbell, Family::cylinder, Family::custom_table})
    if (family_name(f) == s) return f;
  return std::nullopt;
}

// Stage toggles for the pipeline.  All stages run by default.
struct PipelineToggles {
  bool jang = true;
  bool masses = true;
  bool hulls = true;
  bool imcf = true;
  bool glue = true;
  bool criteria = true;
};

struct ScenarioSpec {
  std::string name;
  Family family = Family::flat;
  double m = 1.0;          // mass parameter
  double rho0 = 1e-3;      // star central density
  double r_min = 0.05;
  double r_b = 4.0;        // boundary radius
  double neck_r = 2.0;     // dumbbell neck center
  double neck_depth = 1.0;
  double neck_width = 0.6;
  double cyl_R = 1.0;      // cylinder sphere radius
  double cyl_L = 1.0;      // cylinder half-length
  std::size_t grid_count = 1024;
  double tau_b = 0.0;      // Jang boundary value
  double jang_eps_min = 0.0;  // regularization floor override; 0 = default
  std::string table_file;
  PipelineToggles toggles;
  Tolerances tol;
  AuditConfig audit;
};

namespace detail {

inline SphericalInitialData build_flat(const ScenarioSpec& s) {
  SphericalInitialData d;
  d.metric.grid = RadialGrid::uniform(s.r_min, s.r_b, s.grid_count);
  const std::size_t n = d.metric.grid.count();
  d.metric.a.assign(n, 1.0);
  d.metric.rho = d.metric.grid.nodes;
  d.k_rr.assign(n, 0.0);
  d.k_t.assign(n, 0.0);
  return d;
}

inline SphericalInitialData build_schwarzschild(const ScenarioSpec& s) {
  if (s.r_min <= 2.0 * s.m)
    throw DegenerateInputError(
        "areal Schwarzschild grid must start outside r = 2m");
  SphericalInitialData d;
  d.metric.grid = RadialGrid::uniform(s.r_min, s.r_b, s.grid_count);
  const std::size_t n = d.metric.grid.count();
  d.metric.a.resize(n);
  d.metric.rho = d.metric.grid.nodes;
  for (std::size_t i = 0; i < n; ++i)
    d.metric.a[i] = 1.0 / (1.0 - 2.0 * s.m / d.metric.grid.nodes[i]);
  d.k_rr.assign(n, 0.0);
  d.k_t.assign(n, 0.0);
  return d;
}

// Isotropic slice psi^4 (drbar^2 + rbar^2 dOmega^2); regular through the
// horizon rbar = m/2.  r_min/r_b are isotropic radii here.
inline SphericalInitialData build_isotropic(const ScenarioSpec& s) {
  SphericalInitialData d;
  d.metric.grid = RadialGrid::uniform(s.r_min, s.r_b, s.grid_count);
  const std::size_t n = d.metric.grid.count();
  d.metric.a.resize(n);
  d.metric.rho.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rb = d.metric.grid.nodes[i];
    const double psi = 1.0 + s.m / (2.0 * rb);
    d.metric.a[i] = psi * psi * psi * psi;
    d.metric.rho[i] = rb * psi * psi;
  }
  d.k_rr.assign(n, 0.0);
  d.k_t.assign(n, 0.0);
  return d;
}

inline SphericalInitialData build_pg(const ScenarioSpec& s) {
  SphericalInitialData d;
  d.metric.grid = RadialGrid::uniform(s.r_min, s.r_b, s.grid_count);
  const std::size_t n = d.metric.grid.count();
  d.metric.a.assign(n, 1.0);
  d.metric.rho = d.metric.grid.nodes;
  d.k_rr.resize(n);
  d.k_t.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = d.metric.grid.nodes[i];
    d.k_t[i] = std::sqrt(2.0 * s.m / r) / r;
    d.k_rr[i] = -0.5 * std::sqrt(2.0 * s.m / (r * r * r));
  }
  return d;
}

inline SphericalInitialData build_star(const ScenarioSpec& s) {
  const double c = 8.0 * kPi * s.rho0 / 3.0;
  if (c * s.r_b * s.r_b >= 1.0)
    throw DegenerateInputError("star boundary beyond the metric cap");
  SphericalInitialData d;
  d.metric.grid = RadialGrid::uniform(s.r_min, s.r_b, s.grid_count);
  const std::size_t n = d.metric.grid.count();
  d.metric.a.resize(n);
  d.metric.rho = d.metric.grid.nodes;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = d.metric.grid.nodes[i];
    d.metric.a[i] = 1.0 / (1.0 - c * r * r);
  }
  d.k_rr.assign(n, 0.0);
  d.k_t.assign(n, 0.0);
  return d;
}

// Time-symmetric neck profile: rho = r - depth * exp(-((r-neck)/width)^2).
inline SphericalInitialData build_dumbbell(const ScenarioSpec& s) {
  SphericalInitialData d;
  d.metric.grid = RadialGrid::uniform(s.r_min, s.r_b, s.grid_count);
  const std::size_t n = d.metric.grid.count();
  d.metric.a.assign(n, 1.0);
  d.metric.rho.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = d.metric.grid.nodes[i];
    const double x = (r - s.neck_r) / s.neck_width;
    d.metric.rho[i] = r - s.neck_depth * std::exp(-x * x);
    if (!(d.metric.rho[i] > 0.0))
      throw DegenerateInputError("dumbbell profile crosses zero");
  }
  d.k_rr.assign(n, 0.0);
  d.k_t.assign(n, 0.0);
  return d;
}

// S^2_R x (-L, L) round cylinder with a smooth outward-flaring cap beyond
// r = 2L so the boundary is untrapped.  Coordinate r in [0, 2L + R].
inline SphericalInitialData build_cylinder(const ScenarioSpec& s) {
  SphericalInitialData d;
  const double body = 2.0 * s.cyl_L;
  const double cap = s.cyl_R;
  d.metric.grid = RadialGrid::uniform(s.r_min, body + cap, s.grid_count);
  const std::size_t n = d.metric.grid.count();
  d.metric.a.assign(n, 1.0);
  d.metric.rho.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = d.metric.grid.nodes[i];
    if (r <= body) {
      d.metric.rho[i] = s.cyl_R;
    } else {
      const double x = r - body;
      // C^1 flare: rho' goes from 0 to O(1) quadratically.
      d.metric.rho[i] = s.cyl_R + x * x * x / (cap * cap);
    }
  }
  d.k_rr.assign(n, 0.0);
  d.k_t.assign(n, 0.0);
  return d;
}

inline SphericalInitialData build_table(const ScenarioSpec& s) {
  std::ifstream in(s.table_file);
  if (!in)
    throw std::runtime_error("cannot open table file: " + s.table_file);
  std::vector<double> r, a, rho, krr, kt;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    double vr, va, vrho, vkrr, vkt;
    if (!(row >> vr)) continue;  // blank line
    if (!(row >> va >> vrho >> vkrr >> vkt))
      throw std::runtime_error("table line " + std::to_string(lineno) +
                               ": expected columns r a rho k_rr k_t");
    r.push_back(vr);
    a.push_back(va);
    rho.push_back(vrho);
    krr.push_back(vkrr);
    kt.push_back(vkt);
  }
  SphericalInitialData d;
  d.metric.grid = RadialGrid::from_nodes(std::move(r));
  d.metric.a = std::move(a);
  d.metric.rho = std::move(rho);
  d.k_rr = std::move(krr);
  d.k_t = std::move(kt);
  d.validate();
  return d;
}

}  // namespace detail

inline SphericalInitialData build_initial_data(const ScenarioSpec& s) {
  switch (s.family) {
    case Family::flat: return detail::build_flat(s);
    case Family::schwarzschild: return detail::build_schwarzschild(s);
    case Family::schwarzschild_isotropic: return detail::build_isotropic(s);
    case Family::painleve_gullstrand: return detail::build_pg(s);
    case Family::constant_density_star: return detail::build_star(s);
    case Family::dumbbell: return detail::build_dumbbell(s);
    case Family::cylinder: return detail::build_cylinder(s);
    case Family::custom_table: return detail::build_table(s);
  }
  throw std::logic_error("unreachable family");
}

// Built-in scenarios usable by name from the CLI.
inline std::vector<ScenarioSpec> builtin_scenarios() {
  std::vector<ScenarioSpec> out;
  {
    ScenarioSpec s;
    s.name = "flat_rb3";
    s.family = Family::flat;
    s.r_min = 0.05;
    s.r_b = 3.0;
    out.push_back(s);
  }
  {
    ScenarioSpec s;
    s.name = "schwarzschild_m1_rb4";
    s.family = Family::schwarzschild;
    s.m = 1.0;
    s.r_min = 2.25;
    s.r_b = 4.0;
    out.push_back(s);
  }
  {
    ScenarioSpec s;
    s.name = "schwarzschild_isotropic_m1";
    s.family = Family::schwarzschild_isotropic;
    s.m = 1.0;
    s.r_min = 0.5;        // horizon rbar = m/2
    s.r_b = 2.9142135623730951;  // area radius 4m
    out.push_back(s);
  }
  {
    ScenarioSpec s;
    s.name = "pg_m1_rb4";
    s.family = Family::painleve_gullstrand;
    s.m = 1.0;
    s.r_min = 0.05;
    s.r_b = 4.0;
    s.grid_count = 2048;
    out.push_back(s);
  }
  {
    ScenarioSpec s;
    s.name = "pg_m1_annulus_3_4";
    s.family = Family::painleve_gullstrand;
    s.m = 1.0;
    s.r_min = 3.0;
    s.r_b = 4.0;
    s.grid_count = 4096;
    out.push_back(s);
  }
  {
    ScenarioSpec s;
    s.name = "star_rho1em3_rb4";
    s.family = Family::constant_density_star;
    s.rho0 = 1e-3;
    s.r_min = 0.05;
    s.r_b = 4.0;
    out.push_back(s);
  }
  {
    ScenarioSpec s;
    s.name = "dumbbell_neck2";
    s.family = Family::dumbbell;
    s.r_min = 0.3;
    s.r_b = 4.0;
    out.push_back(s);
  }
  {
    ScenarioSpec s;
    s.name = "schwarzschild_m0p01_annulus_3_4";
    s.family = Family::schwarzschild;
    s.m = 0.01;
    s.r_min = 3.0;
    s.r_b = 4.0;
    out.push_back(s);
  }
  return out;
}

// Key-value scenario file parser.  Lines are `key = value`; `#` comments.
inline ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::istringstream probe(line);
      std::string word;
      if (probe >> word)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected `key = value`");
      continue;
    }
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t");
      const auto e = t.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  if (!kv.count("family"))
    throw std::runtime_error(path + ": missing required field `family`");
  ScenarioSpec s;
  const auto fam = family_from_name(kv.at("family"));
  if (!fam)
    throw std::runtime_error(path + ": unknown family " + kv.at("family"));
  s.family = *fam;
  s.name = kv.count("name") ? kv.at("name") : "unnamed";
  auto getd = [&](const char* key, double& slot) {
    if (kv.count(key)) slot = std::stod(kv.at(key));
  };
  getd("m", s.m);
  getd("rho0", s.rho0);
  getd("r_min", s.r_min);
  getd("r_b", s.r_b);
  getd("neck_r", s.neck_r);
  getd("neck_depth", s.neck_depth);
  getd("neck_width", s.neck_width);
  getd("cyl_R", s.cyl_R);
  getd("cyl_L", s.cyl_L);
  getd("tau_b", s.tau_b);
  getd("jang_eps_min", s.jang_eps_min);
  getd("tol_dec", s.tol.dec);
  getd("delta", s.audit.delta);
  if (kv.count("grid_count"))
    s.grid_count = static_cast<std::size_t>(std::stoul(kv.at("grid_count")));
  if (kv.count("table_file")) s.table_file = kv.at("table_file");
  if (s.family == Family::custom_table && s.table_file.empty())
    throw std::runtime_error(path + ": custom_table requires `table_file`");
  // Validate eagerly so malformed files fail at load time.
  build_initial_data(s);
  return s;
}

}  // namespace penrose

#endif  // PENROSE_SCENARIO_HPP_
