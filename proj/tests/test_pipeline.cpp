#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "penrose/pipeline.hpp"

using namespace penrose;

namespace {

ScenarioSpec builtin(const std::string& name) {
  for (const auto& s : builtin_scenarios())
    if (s.name == name) return s;
  throw std::runtime_error("no builtin scenario " + name);
}

const RunReport* run_once(const std::string& name) {
  static std::map<std::string, RunReport> cache;
  auto it = cache.find(name);
  if (it == cache.end())
    it = cache.emplace(name, run_pipeline(builtin(name))).first;
  return &it->second;
}

const VerdictReport& verdict(const RunReport& rep, const std::string& name) {
  for (const auto& v : rep.verdicts)
    if (v.name == name) return v;
  throw std::runtime_error("no verdict " + name);
}

const CriterionVerdict& criterion(const RunReport& rep, CriterionKind k) {
  for (const auto& c : rep.criteria)
    if (c.criterion == k) return c;
  throw std::runtime_error("criterion missing");
}

}  // namespace

TEST_CASE("pipeline: flat scenario") {
  const auto& rep = *run_once("flat_rb3");
  CHECK_FALSE(rep.hard_failure);
  for (const auto& st : rep.stages) CHECK(st.status == "ok");
  CHECK(std::abs(rep.observables.at("m_LY")) < 1e-8);
  CHECK(rep.observables.at("m_H_hull") == 0.0);
  CHECK(rep.observables.count("mots_radius") == 0);
  CHECK(verdict(rep, "dec").holds);
  CHECK(verdict(rep, "mass_chain").holds);
  CHECK(criterion(rep, CriterionKind::prop17).conclusion ==
        Conclusion::not_exists);
  CHECK(criterion(rep, CriterionKind::schoen_yau).conclusion ==
        Conclusion::inconclusive);
}

TEST_CASE("pipeline: time-symmetric mass-parameter scenario") {
  const auto& rep = *run_once("schwarzschild_m1_rb4");
  CHECK_FALSE(rep.hard_failure);
  CHECK(rep.observables.at("m_LY") ==
        doctest::Approx(1.1715728752538097).epsilon(1e-5));
  CHECK(rep.observables.at("m_H_hull") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.observables.at("m_WY_tau0") ==
        doctest::Approx(rep.observables.at("m_LY")).epsilon(1e-10));
  CHECK(verdict(rep, "mass_chain").holds);
  CHECK(verdict(rep, "geroch_monotonicity").holds);
  // flow of round spheres carries the mass parameter unchanged
  for (const auto& s : rep.flow.samples)
    CHECK(s.m_H == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.observables.at("m_ext") == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("pipeline: expanding slice with horizon") {
  const auto& rep = *run_once("pg_m1_rb4");
  CHECK_FALSE(rep.hard_failure);
  CHECK(rep.observables.at("mots_radius") ==
        doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rep.observables.at("blowup_radius") ==
        doctest::Approx(2.0).epsilon(1e-2));
  const auto& pen = verdict(rep, "penrose_quasilocal");
  CHECK(pen.holds);
  CHECK(pen.rhs == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(pen.lhs - pen.rhs >= 0.17);
  // throat hull carries the horizon's irreducible mass
  CHECK(rep.observables.at("m_H_hull") >= 1.0 - 1e-2);
  CHECK(criterion(rep, CriterionKind::schoen_yau).values.at("agreement") ==
        1.0);
}

TEST_CASE("pipeline: neck profile completes with notes") {
  const auto& rep = *run_once("dumbbell_neck2");
  CHECK_FALSE(rep.hard_failure);
  for (const auto& st : rep.stages) CHECK(st.status == "ok");
  // size measurement is undefined on this profile and is reported, not fatal
  bool noted = false;
  for (const auto& n : rep.notes)
    if (n.find("rad") != std::string::npos) noted = true;
  CHECK(noted);
  // nonexistence criterion is withheld when the energy condition fails
  const auto& p17 = criterion(rep, CriterionKind::prop17);
  CHECK(p17.conclusion == Conclusion::inconclusive);
  CHECK(rep.observables.count("minimal_radius") == 1);
  CHECK(criterion(rep, CriterionKind::prop15).conclusion ==
        Conclusion::exists);
}

TEST_CASE("pipeline: deterministic serialization and emit formats") {
  auto spec = builtin("flat_rb3");
  spec.grid_count = 256;
  const auto r1 = run_pipeline(spec);
  const auto r2 = run_pipeline(spec);
  const std::string d1 = report_json(r1).dump(2);
  const std::string d2 = report_json(r2).dump(2);
  CHECK(d1 == d2);
  CHECK(nlohmann::json::parse(d1)["schema_version"] ==
        "penrose-lab-report-1");

  const std::string dir =
      (std::filesystem::temp_directory_path() / "penrose_emit_test").string();
  std::filesystem::remove_all(dir);
  for (const std::string& fmt : {"json", "csv", "plotdata"}) {
    const auto files = emit(r1, fmt, dir);
    for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);
  }
  CHECK_THROWS_AS(emit(r1, "xml", dir), std::invalid_argument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("pipeline: grid sweep convergence and trend sweep") {
  // isotropic chart: boundary quantities carry a real O(h^2) stencil error
  // (the areal chart differentiates a linear profile exactly)
  auto spec = builtin("schwarzschild_isotropic_m1");
  spec.toggles.imcf = false;
  spec.toggles.glue = false;
  spec.toggles.criteria = false;
  auto sw = sweep(spec, SweepAxis::grid, {512, 1024, 2048, 4096});
  REQUIRE(sw.reports.size() == 4);
  REQUIRE(sw.orders.count("m_H_boundary") == 1);
  CHECK(sw.orders.at("m_H_boundary") >= 1.9);

  // boundary mass approaches the mass parameter as the boundary recedes
  spec.toggles.jang = false;
  spec.toggles.hulls = false;
  spec.grid_count = 512;
  auto swr = sweep(spec, SweepAxis::r_b, {4.0, 8.0, 16.0, 32.0});
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& r : swr.reports) {
    const double v = r.observables.at("m_LY");
    CHECK(v > 1.0);
    CHECK(v < prev);
    prev = v;
  }
  const std::string dir =
      (std::filesystem::temp_directory_path() / "penrose_sweep_test").string();
  std::filesystem::remove_all(dir);
  const auto files = emit_sweep(sw, "grid_sweep", dir);
  CHECK(files.size() == 2);
  for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario files: load, validate, diagnose") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "penrose_scn_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  {
    std::ofstream out(dir / "ok.scn");
    out << "# lengths in units of the mass parameter\n"
        << "name = demo\nfamily = painleve_gullstrand\nm = 1.0\n"
        << "r_min = 3.0\nr_b = 4.0\ngrid_count = 512\n";
  }
  auto s = load_scenario((dir / "ok.scn").string());
  CHECK(s.name == "demo");
  CHECK(s.family == Family::painleve_gullstrand);
  CHECK(s.grid_count == 512);

  {
    std::ofstream out(dir / "bad.scn");
    out << "name = nofamily\nm = 1.0\n";
  }
  CHECK_THROWS_WITH_AS(load_scenario((dir / "bad.scn").string()),
                       doctest::Contains("family"), std::runtime_error);

  {
    std::ofstream out(dir / "table.dat");
    out << "# r a rho k_rr k_t\n"
        << "1.0 1.0 1.0 0 0\n0.5 1.0 0.5 0 0\n2.0 1.0 2.0 0 0\n";
    std::ofstream scn(dir / "tbl.scn");
    scn << "family = custom_table\ntable_file = " << (dir / "table.dat").string()
        << "\n";
  }
  CHECK_THROWS(load_scenario((dir / "tbl.scn").string()));

  // builtin catalogue is intact and buildable
  auto all = builtin_scenarios();
  CHECK(all.size() >= 8);
  for (const auto& b : all) CHECK(build_initial_data(b).grid().count() >= 16);
  fs::remove_all(dir);
}
