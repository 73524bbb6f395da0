// Command-line front end: run a scenario through the pipeline, sweep a
// parameter axis, list the built-in scenario catalogue, or run the
// acceptance suite.
//
// Exit codes: 0 completed, 1 usage error, 2 stage hard failure,
// 3 acceptance violation (verify).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "penrose/acceptance.hpp"

namespace {

using namespace penrose;

ScenarioSpec resolve_scenario(const std::string& ref) {
  if (std::filesystem::exists(ref)) return load_scenario(ref);
  for (const auto& s : builtin_scenarios())
    if (s.name == ref) return s;
  throw std::runtime_error("unknown scenario '" + ref +
                           "' (not a builtin name or readable file)");
}

void apply_toggles(ScenarioSpec& spec, const std::vector<std::string>& ts) {
  for (const auto& t : ts) {
    const auto eq = t.find('=');
    const std::string stage = t.substr(0, eq);
    const bool on =
        eq == std::string::npos ? false : t.substr(eq + 1) != "off";
    if (stage == "jang")
      spec.toggles.jang = on;
    else if (stage == "masses")
      spec.toggles.masses = on;
    else if (stage == "hulls")
      spec.toggles.hulls = on;
    else if (stage == "imcf")
      spec.toggles.imcf = on;
    else if (stage == "glue")
      spec.toggles.glue = on;
    else if (stage == "criteria")
      spec.toggles.criteria = on;
    else
      throw std::runtime_error("unknown stage toggle '" + stage + "'");
  }
}

void print_summary(const RunReport& rep) {
  std::printf("scenario %s\n", rep.spec.name.c_str());
  for (const auto& st : rep.stages) {
    std::printf("  stage %-12s %s", st.name.c_str(), st.status.c_str());
    if (!st.error.empty()) std::printf("  (%s)", st.error.c_str());
    std::printf("\n");
  }
  for (const auto& v : rep.verdicts)
    std::printf("  verdict %-22s %s\n", v.name.c_str(),
                v.holds ? "holds" : "fails");
  for (const auto& c : rep.criteria)
    std::printf("  criterion %-22s %s\n", criterion_name(c.criterion),
                conclusion_name(c.conclusion));
  for (const auto& [k, v] : rep.observables)
    std::printf("  %-24s % .12g\n", k.c_str(), v);
  for (const auto& n : rep.notes) std::printf("  note: %s\n", n.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-local mass and horizon-criteria lab"};
  app.require_subcommand(1);

  std::string scenario, out_dir = "out", format = "json", axis = "grid";
  std::size_t grid = 0;
  std::vector<std::string> toggles;
  std::vector<double> values;

  auto add_common = [&](CLI::App* cmd, bool need_scenario) {
    auto* o = cmd->add_option("--scenario", scenario,
                              "builtin scenario name or scenario file path");
    if (need_scenario) o->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--grid", grid, "override grid node count");
    cmd->add_option("--toggle", toggles,
                    "stage toggle, e.g. imcf=off (repeatable)");
  };

  auto* run_cmd = app.add_subcommand("run", "run one scenario");
  add_common(run_cmd, true);
  run_cmd->add_option("--format", format, "json, csv, or plotdata");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "run a scenario across a parameter axis");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--axis", axis, "grid, delta, r_b, m, or eps_min");
  sweep_cmd->add_option("--values", values, "axis values")->required();

  app.add_subcommand("list-scenarios", "list the built-in scenarios");
  app.add_subcommand("verify", "run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      auto spec = resolve_scenario(scenario);
      if (grid > 0) spec.grid_count = grid;
      apply_toggles(spec, toggles);
      const auto rep = run_pipeline(spec);
      print_summary(rep);
      for (const auto& f : emit(rep, format, out_dir))
        std::printf("wrote %s\n", f.c_str());
      return rep.hard_failure ? 2 : 0;
    }
    if (sweep_cmd->parsed()) {
      auto spec = resolve_scenario(scenario);
      if (grid > 0) spec.grid_count = grid;
      apply_toggles(spec, toggles);
      const auto ax = sweep_axis_from_name(axis);
      if (!ax) throw std::runtime_error("unknown sweep axis '" + axis + "'");
      const auto sw = sweep(spec, *ax, values);
      bool hard = false;
      for (std::size_t i = 0; i < sw.reports.size(); ++i) {
        std::printf("%s = %g: %s\n", sweep_axis_name(sw.axis), sw.values[i],
                    sw.reports[i].hard_failure ? "hard failure" : "completed");
        hard = hard || sw.reports[i].hard_failure;
      }
      for (const auto& [k, o] : sw.orders)
        std::printf("  order %-24s %.3f\n", k.c_str(), o);
      const std::string name =
          spec.name + "_" + sweep_axis_name(*ax);
      for (const auto& f : emit_sweep(sw, name, out_dir))
        std::printf("wrote %s\n", f.c_str());
      return hard ? 2 : 0;
    }
    if (app.get_subcommand("list-scenarios")->parsed()) {
      for (const auto& s : builtin_scenarios())
        std::printf("%-32s %-24s [%g, %g]  N=%zu\n", s.name.c_str(),
                    family_name(s.family).c_str(), s.r_min, s.r_b,
                    s.grid_count);
      return 0;
    }
    if (app.get_subcommand("verify")->parsed()) {
      const int failures = print_acceptance(std::cout);
      if (failures > 0) {
        std::printf("%d acceptance criteria failed\n", failures);
        return 3;
      }
      std::printf("all acceptance criteria passed\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
