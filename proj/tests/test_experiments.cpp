#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bvlab/experiments.hpp"

using namespace bvlab;

namespace {

space::Discretization make(space::Shape shape, double h) {
  space::DomainSpec spec;
  spec.shape = shape;
  spec.h = h;
  return space::build_domain(spec);
}

lab::ScenarioConfig base_config(const std::string& name) {
  lab::ScenarioConfig cfg;
  cfg.scenario = name;
  return cfg;
}

double value_of(const lab::ScenarioReport& rep, const std::string& name) {
  for (const auto& c : rep.checks)
    if (c.name == name) return c.value;
  FAIL("missing check: ", name);
  return 0.0;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("the scenario and fixture registries are stable") {
  const std::vector<std::string> scenarios = {
      "besov-extension-bound", "layer-estimates",  "l1-extension-bound",
      "trace-recovery",        "thin-tube-counterexample",
      "space-comparison",      "regularity-audit"};
  CHECK(lab::scenario_names() == scenarios);

  const std::vector<std::string> fixtures = {
      "constant",           "coordinate",         "step",
      "arc",                "random-lipschitz-1", "family-0",
      "besov-divergent-16", "weierstrass-8"};
  CHECK(lab::fixture_names() == fixtures);

  // every advertised fixture builds a boundary field of the right size
  const auto d = make(space::Shape::unit_square, 1.0 / 32);
  for (const auto& name : lab::fixture_names()) {
    const auto f = lab::fixture_field(d, name);
    CHECK(f.domain == norms::FieldDomain::boundary);
    CHECK(f.values.size() == d.boundary_points.size());
  }
  CHECK_THROWS_AS(lab::fixture_field(d, "no-such-fixture"),
                  std::invalid_argument);
  CHECK_THROWS_AS(lab::fixture_field(d, "family-"), std::invalid_argument);
}

TEST_CASE("boundary fixtures realize their advertised shapes") {
  const auto d = make(space::Shape::unit_square, 1.0 / 32);
  const std::size_t n = d.boundary_points.size();

  const auto ones = lab::fixture_field(d, "constant");
  for (double v : ones.values) CHECK(v == 1.0);

  const auto coord = lab::fixture_field(d, "coordinate");
  for (std::size_t i = 0; i < n; ++i)
    CHECK(coord.values[i] == d.boundary_points[i].x);

  // the step splits the boundary at the midline of its y-range
  const auto step = lab::fixture_field(d, "step");
  for (std::size_t i = 0; i < n; ++i) {
    const double expect = d.boundary_points[i].y < 0.5 ? 1.0 : 0.0;
    CHECK(step.values[i] == expect);
  }

  // the arc indicator covers a quarter of the angular range; on the square
  // that is a quarter of the perimeter by symmetry
  const auto arc = lab::fixture_field(d, "arc");
  double lit = 0.0;
  for (double v : arc.values) {
    CHECK((v == 0.0 || v == 1.0));
    lit += v;
  }
  CHECK(lit / static_cast<double>(n) == doctest::Approx(0.25).epsilon(0.1));

  // the seeded rough fixture is still 2-Lipschitz along the boundary
  const auto rough = lab::fixture_field(d, "random-lipschitz-1");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 7) % n;
    const double gap = std::abs(rough.values[i] - rough.values[j]);
    CHECK(gap <= 2.0 * geom::dist(d.boundary_points[i], d.boundary_points[j]) +
                     1e-9);
  }

  // piecewise square waves take only the two plateau values
  const auto waves = lab::fixture_field(d, "besov-divergent-4");
  for (double v : waves.values) CHECK((v == 0.0 || v == 1.0));

  // the lacunary cosine sum is bounded by its geometric coefficient sum
  const auto cosines = lab::fixture_field(d, "weierstrass-4");
  double bound = 0.0;
  for (int k = 1; k <= 4; ++k) bound += std::pow(2.0, -0.6 * k);
  for (double v : cosines.values) CHECK(std::abs(v) <= bound + 1e-12);
}

TEST_CASE("every scenario passes with its default configuration") {
  for (const auto& name : lab::scenario_names()) {
    CAPTURE(name);
    const auto rep = lab::run_scenario(base_config(name));
    CHECK(rep.scenario == name);
    CHECK(rep.tolerance_scale == 1.0);
    CHECK(!rep.tables.empty());
    CHECK(!rep.checks.empty());
    CHECK(rep.wall_seconds > 0.0);
    for (const auto& c : rep.checks) {
      CAPTURE(c.name);
      CHECK(c.lo <= c.hi);
      CHECK(c.pass);
    }
    CHECK(rep.passed());
  }
}

TEST_CASE("default scenario measurements sit where expected") {
  // smoothness-controlled extension: energy/seminorm constant well under 2
  const auto besov = lab::run_scenario(base_config("besov-extension-bound"));
  CHECK(value_of(besov, "bv_besov_constant_m0") ==
        doctest::Approx(0.534).epsilon(0.01));
  CHECK(value_of(besov, "refinement_drift_m0") ==
        doctest::Approx(0.962).epsilon(0.01));

  // summable data: stage radii and gaps halve exactly
  const auto glue = lab::run_scenario(base_config("l1-extension-bound"));
  CHECK(value_of(glue, "radius_halving") ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(value_of(glue, "stage_decay") <= 0.5 + 1e-9);

  // pointwise recovery: finer ball floors land near half the coarse error
  const auto trace = lab::run_scenario(base_config("trace-recovery"));
  CHECK(value_of(trace, "halving_ratio_m0") ==
        doctest::Approx(0.488).epsilon(0.01));
  CHECK(value_of(trace, "clean_recovery_averaged_r0") == 0.0);
  CHECK(value_of(trace, "failures_localized_layered_r1") == 0.0);

  // tube family: the trace/variation ratio doubles from one tube to the next
  const auto tubes =
      lab::run_scenario(base_config("thin-tube-counterexample"));
  CHECK(value_of(tubes, "consecutive_growth_min") ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(value_of(tubes, "consecutive_growth_max") ==
        doctest::Approx(2.0).epsilon(1e-12));

  // the constant field saturates the seminorm sandwich exactly
  const auto space = lab::run_scenario(base_config("space-comparison"));
  CHECK(value_of(space, "jn_sandwich_f0") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(value_of(space, "lacunary_variation_growth") ==
        doctest::Approx(3.03).epsilon(0.01));

  const auto audit = lab::run_scenario(base_config("regularity-audit"));
  CHECK(value_of(audit, "tube_density_decreasing") < 0.0);
}

TEST_CASE("seeded scenario runs serialize byte for byte") {
  auto cfg = base_config("trace-recovery");
  cfg.seed = 3;
  const auto first = lab::run_scenario(cfg);
  const auto second = lab::run_scenario(cfg);
  CHECK(first.to_json() == second.to_json());
  CHECK(first.markdown() == second.markdown());

  // wall time stays out of the data payload
  CHECK(first.to_json().find("wall") == std::string::npos);
}

TEST_CASE("verdicts are a pure function of the tables") {
  const auto rep = lab::run_scenario(base_config("l1-extension-bound"));
  const auto parsed = lab::ScenarioReport::from_json_text(rep.to_json());
  CHECK(parsed.scenario == rep.scenario);
  REQUIRE(parsed.tables.size() == rep.tables.size());
  for (std::size_t t = 0; t < rep.tables.size(); ++t) {
    CHECK(parsed.tables[t].name == rep.tables[t].name);
    CHECK(parsed.tables[t].columns == rep.tables[t].columns);
    CHECK(parsed.tables[t].rows == rep.tables[t].rows);
  }

  // reapplying the verdict step to the parsed tables reproduces every flag
  const auto again =
      lab::verdicts(parsed.scenario, parsed.tables, parsed.tolerance_scale);
  REQUIRE(again.size() == rep.checks.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].name == rep.checks[i].name);
    CHECK(again[i].value == rep.checks[i].value);
    CHECK(again[i].lo == rep.checks[i].lo);
    CHECK(again[i].hi == rep.checks[i].hi);
    CHECK(again[i].pass == rep.checks[i].pass);
  }
}

TEST_CASE("tolerance scale only widens the bands") {
  const auto rep = lab::run_scenario(base_config("besov-extension-bound"));
  const auto wide = lab::verdicts(rep.scenario, rep.tables, 4.0);
  REQUIRE(wide.size() == rep.checks.size());
  for (std::size_t i = 0; i < wide.size(); ++i) {
    CAPTURE(wide[i].name);
    CHECK(wide[i].name == rep.checks[i].name);
    CHECK(wide[i].value == rep.checks[i].value);
    CHECK(wide[i].lo <= rep.checks[i].lo);
    CHECK(wide[i].hi >= rep.checks[i].hi);
    if (rep.checks[i].pass) CHECK(wide[i].pass);
  }
}

TEST_CASE("scenario configs round trip through json") {
  lab::ScenarioConfig cfg;
  cfg.scenario = "trace-recovery";
  cfg.has_domain = true;
  cfg.domain.shape = space::Shape::unit_square;
  cfg.mesh_sweep = {1.0 / 64};
  cfg.fixtures = {"coordinate", "step"};
  cfg.seed = 11;
  cfg.tolerance_scale = 2.0;
  cfg.out_dir = "out/traces";

  const std::string text = cfg.to_json_text();
  const auto back = lab::ScenarioConfig::from_json_text(text);
  CHECK(back.scenario == cfg.scenario);
  CHECK(back.has_domain);
  CHECK(back.domain.shape == cfg.domain.shape);
  CHECK(back.mesh_sweep == cfg.mesh_sweep);
  CHECK(back.fixtures == cfg.fixtures);
  CHECK(back.seed == cfg.seed);
  CHECK(back.tolerance_scale == cfg.tolerance_scale);
  CHECK(back.out_dir == cfg.out_dir);
  CHECK(back.to_json_text() == text);

  // a bare scenario name parses to the all-defaults config
  const auto bare =
      lab::ScenarioConfig::from_json_text("{\"scenario\":\"layer-estimates\"}");
  CHECK(bare.scenario == "layer-estimates");
  CHECK(!bare.has_domain);
  CHECK(bare.mesh_sweep.empty());
  CHECK(bare.fixtures.empty());
  CHECK(bare.seed == 1);
  CHECK(bare.tolerance_scale == 1.0);
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(lab::run_scenario(base_config("no-such-scenario")),
                  std::invalid_argument);
  CHECK_THROWS_AS(lab::verdicts("no-such-scenario", {}, 1.0),
                  std::invalid_argument);

  auto strict = base_config("thin-tube-counterexample");
  strict.tolerance_scale = 0.5;
  CHECK_THROWS_AS(lab::run_scenario(strict), std::invalid_argument);

  auto coarse = base_config("layer-estimates");
  coarse.mesh_sweep = {0.6};
  CHECK_THROWS_AS(lab::run_scenario(coarse), std::invalid_argument);
  coarse.mesh_sweep = {0.0};
  CHECK_THROWS_AS(lab::run_scenario(coarse), std::invalid_argument);

  // layer estimates need a fixture with gradient and mass
  auto flat = base_config("layer-estimates");
  flat.fixtures = {"constant"};
  CHECK_THROWS_AS(lab::run_scenario(flat), std::invalid_argument);

  // the tube growth ratio needs at least two tubes to compare
  auto short_run = base_config("thin-tube-counterexample");
  short_run.has_domain = true;
  short_run.domain.shape = space::Shape::thin_tubes;
  short_run.domain.tube_count = 2;
  short_run.domain.exact_geometry = true;
  CHECK_THROWS_AS(lab::run_scenario(short_run), std::invalid_argument);
}

TEST_CASE("reports land on disk as json, csv and markdown") {
  const auto rep = lab::run_scenario(base_config("thin-tube-counterexample"));
  const auto dir =
      std::filesystem::temp_directory_path() / "bvlab-test-reports";
  std::filesystem::remove_all(dir);

  const auto paths = lab::emit_report(rep, dir.string());
  REQUIRE(paths.size() == rep.tables.size() + 3);
  for (const auto& p : paths) CHECK(std::filesystem::exists(p));

  // the json payload on disk parses back to the same report
  const std::string json_text = slurp(paths.front());
  CHECK(json_text == rep.to_json() + "\n");
  const auto back = lab::ScenarioReport::from_json_text(json_text);
  CHECK(back.passed() == rep.passed());

  // one csv per table, headed by the column names
  const std::string csv = slurp((dir / "thin-tube-counterexample-tube_norms.csv").string());
  CHECK(csv.rfind("n,l1,jump_perimeter,bv_norm,trace_l1,ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(rep.tables.front().rows.size()) + 1);

  // the digest names every check and table
  const std::string md = slurp((dir / "thin-tube-counterexample.md").string());
  for (const auto& c : rep.checks) CHECK(md.find("### " + c.name) != std::string::npos);
  for (const auto& t : rep.tables) CHECK(md.find("### " + t.name) != std::string::npos);

  // wall time lives in the sidecar and nowhere else
  const std::string side = slurp((dir / "thin-tube-counterexample-walltime.json").string());
  CHECK(side.find("wall_seconds") != std::string::npos);

  // a path blocked by a regular file cannot take a report
  const auto block = std::filesystem::temp_directory_path() / "bvlab-test-block";
  std::filesystem::remove_all(block);
  { std::ofstream(block.string()) << "x"; }
  CHECK_THROWS_AS(lab::emit_report(rep, (block / "sub").string()),
                  std::runtime_error);
  std::filesystem::remove_all(dir);
  std::filesystem::remove(block);
}
