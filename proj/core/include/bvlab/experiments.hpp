// Named, configured experiment scenarios with machine-readable verdicts.
//
// A scenario runs the library operators over a mesh sweep and a set of named
// boundary fixtures, collects every measured quantity into numeric tables,
// and then derives pass/fail checks *from the tables alone* — re-running the
// verdict step on a saved report reproduces the flags.  Reports serialize to
// JSON (bit-stable, no timestamps), one CSV per table, and a markdown digest
// with one table per asserted inequality; wall time goes to a sidecar file.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "bvlab/extension.hpp"
#include "bvlab/norms.hpp"
#include "bvlab/space.hpp"
#include "bvlab/trace.hpp"

namespace bvlab::lab {

struct ScenarioConfig {
  std::string scenario;
  bool has_domain = false;        // explicit domain overrides scenario default
  space::DomainSpec domain;       // h is replaced by each sweep entry
  std::vector<double> mesh_sweep; // empty -> scenario default
  std::vector<std::string> fixtures;  // empty -> scenario default
  std::uint64_t seed = 1;
  double tolerance_scale = 1.0;   // >= 1 widens every check band
  std::string out_dir;

  static ScenarioConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

// One asserted inequality: lo <= value <= hi.
struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ScenarioReport {
  std::string scenario;
  std::string config_text;  // resolved config (domain, sweep, fixtures, seed)
  double tolerance_scale = 1.0;
  std::vector<Table> tables;
  std::vector<Check> checks;
  double wall_seconds = 0.0;  // sidecar only, never in the data payload

  bool passed() const;
  std::string to_json() const;
  std::string markdown() const;
  static ScenarioReport from_json_text(const std::string& text);
};

std::vector<std::string> scenario_names();
std::vector<std::string> fixture_names();

// Boundary data by registry name: "constant", "coordinate", "step", "arc",
// "random-lipschitz-<seed>", "family-<k>", "besov-divergent-<J>",
// "weierstrass-<K>".
norms::Field fixture_field(const space::Discretization& disc,
                           const std::string& name);

ScenarioReport run_scenario(const ScenarioConfig& config);

// Pure verdict step: derives the checks from the tables alone.
std::vector<Check> verdicts(const std::string& scenario,
                            std::span<const Table> tables,
                            double tolerance_scale = 1.0);

// Writes <scenario>.json, <scenario>-<table>.csv, <scenario>.md and the
// <scenario>-walltime.json sidecar into dir; returns the paths written.
std::vector<std::string> emit_report(const ScenarioReport& report,
                                     const std::string& dir);

}  // namespace bvlab::lab
