// Command-line front end for the experiment scenarios.
//
//   lab list                     enumerate scenarios and boundary fixtures
//   lab run <scenario> [...]     run one scenario, print its checks
//   lab audit <shape> [...]      measure-regularity shortcut for one domain
//
// Exit status: 0 when every check passes, 2 when a check fails, 1 on a
// configuration or runtime error.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "bvlab/experiments.hpp"

namespace {

using namespace bvlab;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int report_and_exit_code(const lab::ScenarioReport& rep,
                         const std::string& out_dir, bool quiet) {
  if (!quiet) {
    for (const auto& c : rep.checks)
      std::printf("  %-36s %12.6g  in [%g, %g]  %s\n", c.name.c_str(), c.value,
                  c.lo, c.hi, c.pass ? "ok" : "FAIL");
  }
  if (!out_dir.empty()) {
    const auto paths = lab::emit_report(rep, out_dir);
    if (!quiet)
      for (const auto& p : paths) std::printf("  wrote %s\n", p.c_str());
  }
  std::printf("%s  %s  (%.2f s)\n", rep.passed() ? "PASS" : "FAIL",
              rep.scenario.c_str(), rep.wall_seconds);
  return rep.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for boundary traces and extensions"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "enumerate scenarios and fixtures");
  bool list_fixtures = false;
  list->add_flag("--fixtures", list_fixtures,
                 "also print the boundary fixture registry");

  auto* run = app.add_subcommand("run", "run one scenario");
  std::string scenario, config_path, shape_name_arg, out_dir;
  std::vector<double> meshes;
  std::vector<std::string> fixtures;
  std::uint64_t seed = 1;
  double scale = 1.0;
  int tubes = 0;
  bool exact = false, quiet = false;
  run->add_option("scenario", scenario, "scenario name (see `lab list`)");
  run->add_option("--config", config_path,
                  "scenario config as json; flags override its fields")
      ->check(CLI::ExistingFile);
  run->add_option("--shape", shape_name_arg,
                  "run on this domain instead of the scenario default");
  run->add_option("--tubes", tubes, "tube count for the thin-tubes shape");
  run->add_flag("--exact", exact,
                "closed-form geometry backend for thin tubes");
  run->add_option("--mesh", meshes, "mesh sweep entries (repeatable)");
  run->add_option("--fixture", fixtures, "boundary fixtures (repeatable)");
  run->add_option("--seed", seed, "sampling seed");
  run->add_option("--scale", scale, "tolerance scale >= 1 widens every band");
  run->add_option("--out", out_dir, "write json/csv/markdown reports here");
  run->add_flag("--quiet", quiet, "print only the final verdict line");

  auto* audit = app.add_subcommand("audit", "regularity audit of one domain");
  std::string audit_shape, audit_out;
  double audit_mesh = 0.0;
  int audit_tubes = 0;
  bool audit_exact = false, audit_quiet = false;
  audit->add_option("shape", audit_shape, "domain shape name")->required();
  audit->add_option("--mesh", audit_mesh, "mesh size");
  audit->add_option("--tubes", audit_tubes, "tube count for thin-tubes");
  audit->add_flag("--exact", audit_exact,
                  "closed-form geometry backend for thin tubes");
  audit->add_option("--out", audit_out, "write reports here");
  audit->add_flag("--quiet", audit_quiet, "print only the final verdict line");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      std::printf("scenarios:\n");
      for (const auto& s : lab::scenario_names())
        std::printf("  %s\n", s.c_str());
      if (list_fixtures) {
        std::printf("fixtures:\n");
        for (const auto& f : lab::fixture_names())
          std::printf("  %s\n", f.c_str());
      }
      return 0;
    }

    lab::ScenarioConfig cfg;
    if (*run) {
      if (!config_path.empty())
        cfg = lab::ScenarioConfig::from_json_text(slurp(config_path));
      if (!scenario.empty()) cfg.scenario = scenario;
      if (cfg.scenario.empty())
        throw std::invalid_argument("pass a scenario name or --config");
      if (!shape_name_arg.empty()) {
        cfg.has_domain = true;
        cfg.domain.shape = space::parse_shape(shape_name_arg);
        if (run->count("--tubes")) cfg.domain.tube_count = tubes;
        if (run->count("--exact")) cfg.domain.exact_geometry = exact;
      }
      if (!meshes.empty()) cfg.mesh_sweep = meshes;
      if (!fixtures.empty()) cfg.fixtures = fixtures;
      if (run->count("--seed")) cfg.seed = seed;
      if (run->count("--scale")) cfg.tolerance_scale = scale;
      if (run->count("--out")) cfg.out_dir = out_dir;
    } else {
      cfg.scenario = "regularity-audit";
      cfg.has_domain = true;
      cfg.domain.shape = space::parse_shape(audit_shape);
      if (audit->count("--tubes")) cfg.domain.tube_count = audit_tubes;
      if (audit->count("--exact")) cfg.domain.exact_geometry = audit_exact;
      if (audit->count("--mesh")) cfg.mesh_sweep = {audit_mesh};
      cfg.out_dir = audit_out;
      quiet = audit_quiet;
    }

    const auto rep = lab::run_scenario(cfg);
    return report_and_exit_code(rep, cfg.out_dir, quiet);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lab: %s\n", e.what());
    return 1;
  }
}
