#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bvlab/space.hpp"

using namespace bvlab::space;
using bvlab::geom::Vec2;

constexpr double pi = std::numbers::pi;

namespace {

DomainSpec make_spec(Shape s, double h) {
  DomainSpec spec;
  spec.shape = s;
  spec.h = h;
  if (s == Shape::thin_tubes) spec.tube_count = 3;
  return spec;
}

double edge_weight_sum(const Discretization& d, int edge) {
  double sum = 0;
  const BoundaryEdge& e = d.edges[edge];
  for (int i = 0; i < e.sample_count; ++i) sum += d.h_weights[e.first_sample + i];
  return sum;
}

// Oracle for the thin-tube audit minimum: a ball of radius r at the top
// center of tube n sees the area  r^2 (asin(s) + s sqrt(1-s^2)),  s = w/r,
// of the tube strip, as long as it clears the base and both neighbors.
double tube_probe_ratio(int n, int tube_count) {
  const auto rect = thin_tube_rect(n);
  const Vec2 top{0.5 * (rect.x0 + rect.x1), rect.y1};
  auto rect_dist = [](Vec2 p, const bvlab::geom::Rect& r) {
    const double dx = std::max({r.x0 - p.x, 0.0, p.x - r.x1});
    const double dy = std::max({r.y0 - p.y, 0.0, p.y - r.y1});
    return std::hypot(dx, dy);
  };
  double r = rect.height();
  if (n > 1) r = std::min(r, rect_dist(top, thin_tube_rect(n - 1)));
  if (n < tube_count) r = std::min(r, rect_dist(top, thin_tube_rect(n + 1)));
  const double s = 0.5 * rect.width() / r;
  return (std::asin(s) + s * std::sqrt(1 - s * s)) / pi;
}

}  // namespace

TEST_CASE("unit square discretization") {
  const auto d = build_domain(make_spec(Shape::unit_square, 1.0 / 64));
  CHECK(d.interior_points.size() == 4096);
  CHECK(d.mu_total() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(d.boundary_points.size() == 256);
  CHECK(d.diam == doctest::Approx(std::sqrt(2.0)));

  // complement distance must be exact on the square
  double worst = 0;
  for (std::size_t i = 0; i < d.interior_points.size(); ++i) {
    const Vec2 p = d.interior_points[i];
    const double want = std::min({p.x, 1 - p.x, p.y, 1 - p.y});
    worst = std::max(worst, std::abs(d.dist_to_boundary[i] - want));
  }
  CHECK(worst <= 1e-12);

  // calibrated boundary mass: pi/2 per unit of straight edge
  CHECK(d.h_total() == doctest::Approx(2 * pi).epsilon(1e-9));
  for (int e = 0; e < 4; ++e)
    CHECK(edge_weight_sum(d, e) == doctest::Approx(pi / 2).epsilon(1e-9));
}

TEST_CASE("disc discretization") {
  const auto d = build_domain(make_spec(Shape::disc, 1.0 / 64));
  CHECK(d.mu_total() == doctest::Approx(pi).epsilon(0.02));
  CHECK(d.boundary_points.size() % 2 == 1);  // odd by construction
  CHECK(d.h_total() == doctest::Approx(pi * pi).epsilon(0.02));
  double worst = 0;
  for (std::size_t i = 0; i < d.interior_points.size(); ++i)
    worst = std::max(worst, std::abs(d.dist_to_boundary[i] -
                                     (1.0 - bvlab::geom::norm(d.interior_points[i]))));
  CHECK(worst <= 1e-12);
}

TEST_CASE("slit disc discretization") {
  const auto d = build_domain(make_spec(Shape::slit_disc, 1.0 / 64));
  REQUIRE(d.curves.size() == 2);
  CHECK(d.curves[0].closed);
  CHECK(!d.curves[1].closed);
  // the slit contributes pi/2 of boundary mass on top of the circle
  CHECK(d.h_total() == doctest::Approx(pi * pi + pi / 2).epsilon(0.02));
  // distance near the slit is the vertical gap, not the distance to the circle
  const Vec2 probe{0.5, 1.0 / 128};
  double best = 1e9;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < d.interior_points.size(); ++i)
    if (bvlab::geom::dist(d.interior_points[i], probe) < best) {
      best = bvlab::geom::dist(d.interior_points[i], probe);
      best_i = i;
    }
  CHECK(d.dist_to_boundary[best_i] == doctest::Approx(d.interior_points[best_i].y));
}

TEST_CASE("thin tube grid resolves only wide tubes") {
  DomainSpec spec = make_spec(Shape::thin_tubes, 1.0 / 64);
  spec.tube_count = 5;
  const auto d = build_domain(spec);
  // widths: tube 3 has 2*4^-3 = 1/32 = 2h (kept), tube 4 is thinner (dropped)
  bool any_in_tube4 = false, any_in_tube3 = false;
  for (const Vec2& p : d.interior_points) {
    if (thin_tube_rect(4).contains(p)) any_in_tube4 = true;
    if (thin_tube_rect(3).contains(p)) any_in_tube3 = true;
  }
  CHECK(any_in_tube3);
  CHECK(!any_in_tube4);
  const double expected =
      3.0 + thin_tube_area(1) + thin_tube_area(2) + thin_tube_area(3);
  CHECK(d.mu_total() == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("thin tube cells carry exact dyadic mass") {
  DomainSpec spec = make_spec(Shape::thin_tubes, 1.0 / 256);
  const auto d = build_domain(spec);
  std::vector<std::uint8_t> mask(d.interior_points.size(), 0);
  const auto rect = thin_tube_rect(3);
  for (std::size_t i = 0; i < d.interior_points.size(); ++i)
    if (rect.contains(d.interior_points[i])) mask[i] = 1;
  // 8 columns x 32 rows of h^2 cells: exactly the tube area 1/256
  CHECK(measure_of(d, mask, SampleSet::interior) ==
        doctest::Approx(1.0 / 256).epsilon(1e-12));
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i])
      CHECK(d.dist_to_boundary[i] <= std::pow(4.0, -3) + d.mesh_h);
}

TEST_CASE("boundary calibration is mesh stable") {
  for (Shape s : {Shape::unit_square, Shape::disc}) {
    const auto coarse = build_domain(make_spec(s, 1.0 / 64));
    const auto fine = build_domain(make_spec(s, 1.0 / 128));
    CHECK(coarse.h_total() == doctest::Approx(fine.h_total()).epsilon(0.05));
  }
}

TEST_CASE("covering estimates for boundary mass") {
  const auto d = build_domain(make_spec(Shape::unit_square, 1.0 / 64));
  const std::vector<std::uint8_t> all(d.boundary_points.size(), 1);
  const std::vector<double> deltas{1.0 / 8, 1.0 / 16, 1.0 / 32};
  const auto full = codim1_hausdorff(d, all, deltas);
  REQUIRE(full.per_delta.size() == 3);
  for (const auto& [delta, est] : full.per_delta)
    CHECK(est == doctest::Approx(2 * pi).epsilon(0.10));
  CHECK(full.value == full.per_delta.back().second);

  // single straight edge of length 1
  std::vector<std::uint8_t> bottom(d.boundary_points.size(), 0);
  for (int i = 0; i < d.edges[0].sample_count; ++i)
    bottom[d.edges[0].first_sample + i] = 1;
  CHECK(codim1_hausdorff(d, bottom, deltas).value ==
        doctest::Approx(pi / 2).epsilon(0.10));

  // empty set has zero mass at every delta
  const std::vector<std::uint8_t> none(d.boundary_points.size(), 0);
  const auto empty = codim1_hausdorff(d, none, deltas);
  CHECK(empty.value == 0.0);
  for (const auto& [delta, est] : empty.per_delta) CHECK(est == 0.0);
}

TEST_CASE("covering estimate input validation") {
  const auto d = build_domain(make_spec(Shape::unit_square, 1.0 / 64));
  const std::vector<std::uint8_t> all(d.boundary_points.size(), 1);
  CHECK_THROWS_AS(codim1_hausdorff(d, all, std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(codim1_hausdorff(d, all, std::vector<double>{0.1, 0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(codim1_hausdorff(d, all, std::vector<double>{1.0 / 256}),
                  std::invalid_argument);
  const std::vector<std::uint8_t> short_mask(3, 1);
  CHECK_THROWS_AS(codim1_hausdorff(d, short_mask, std::vector<double>{0.1}),
                  std::invalid_argument);
}

TEST_CASE("masked measures") {
  const auto d = build_domain(make_spec(Shape::unit_square, 1.0 / 64));
  const std::vector<std::uint8_t> all_in(d.interior_points.size(), 1);
  CHECK(measure_of(d, all_in, SampleSet::interior) == doctest::Approx(d.mu_total()));
  const std::vector<std::uint8_t> all_bd(d.boundary_points.size(), 1);
  CHECK(measure_of(d, all_bd, SampleSet::boundary) == doctest::Approx(d.h_total()));
  CHECK_THROWS_AS(measure_of(d, all_bd, SampleSet::interior), std::invalid_argument);
  CHECK_THROWS_AS(dist_to_complement(d, -1), std::invalid_argument);
  CHECK(dist_to_complement(d, 0) == d.dist_to_boundary[0]);
}

TEST_CASE("regularity audit on the square") {
  const auto d = build_domain(make_spec(Shape::unit_square, 1.0 / 64));
  const std::vector<double> radii{1.0 / 16, 1.0 / 8, 1.0 / 4};
  const auto rep = regularity_audit(d, radii);
  CHECK(rep.ahlfors_in_bounds);
  CHECK(rep.spread_ok);
  CHECK(rep.density_ok);
  CHECK(rep.ahlfors_min > 0.5);
  CHECK(rep.ahlfors_max < 2.0);
  // smallest interior density is the quarter ball at a corner
  CHECK(rep.density_minimum == doctest::Approx(0.25).epsilon(0.2));
  CHECK(rep.doubling_estimate > 3.0);
  CHECK(rep.doubling_estimate < 5.0);

  const auto fine = regularity_audit(build_domain(make_spec(Shape::unit_square, 1.0 / 128)),
                                     radii);
  CHECK(rep.doubling_estimate ==
        doctest::Approx(fine.doubling_estimate).epsilon(0.10));

  // report schema: header plus one line per (center, radius) pair
  const std::string csv = rep.csv_text();
  CHECK(csv.rfind("x_id,r,mu_ball,h_ball,ahlfors_ratio,density_ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(rep.rows.size()) + 1);
}

TEST_CASE("slit tip sees half the boundary mass") {
  const auto d = build_domain(make_spec(Shape::slit_disc, 1.0 / 64));
  AuditConfig cfg;
  cfg.max_centers = 4000;  // keep every boundary sample, including the tip
  const std::vector<double> radii{1.0 / 8};
  const auto rep = regularity_audit(d, radii, cfg);
  const int tip = d.curves[1].first_sample;  // slit sample nearest the origin
  double tip_ratio = -1;
  for (const auto& row : rep.rows)
    if (row.center == tip) tip_ratio = row.ahlfors_ratio;
  REQUIRE(tip_ratio >= 0);
  CHECK(tip_ratio == doctest::Approx(0.5).epsilon(0.15));
  // interior density at the slit is unaffected by the measure-zero cut
  for (const auto& row : rep.rows)
    if (row.center == tip) CHECK(row.density_ratio > 0.8);
}

TEST_CASE("tube walls see double boundary mass") {
  DomainSpec spec = make_spec(Shape::thin_tubes, 1.0 / 64);
  spec.tube_count = 4;
  spec.exact_geometry = true;
  const auto d = build_domain(spec);
  // a sample midway up a wall of tube 4 (width 1/128, well under the probe radius)
  const auto rect = thin_tube_rect(4);
  const Vec2 target{rect.x0, 0.5 * rect.height()};
  int best = 0;
  for (std::size_t i = 0; i < d.boundary_points.size(); ++i)
    if (bvlab::geom::dist(d.boundary_points[i], target) <
        bvlab::geom::dist(d.boundary_points[best], target))
      best = static_cast<int>(i);
  const double r = 1.0 / 64;
  const double ratio = d.h_ball(d.boundary_points[best], r) * r /
                       Discretization::ball_measure(r);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("thin tube audit minima shrink with depth") {
  std::vector<double> minima;
  for (int n_tubes = 2; n_tubes <= 7; ++n_tubes) {
    DomainSpec spec = make_spec(Shape::thin_tubes, 1.0 / 64);
    spec.tube_count = n_tubes;
    spec.exact_geometry = true;
    const auto d = build_domain(spec);
    AuditConfig cfg;
    cfg.max_centers = 4000;
    const auto radii = thin_tube_audit_radii(n_tubes);
    const auto rep = regularity_audit(d, radii, cfg);
    minima.push_back(rep.density_minimum);

    double expected = 0.25;  // base corner quarter ball
    for (int n = 1; n <= n_tubes; ++n)
      expected = std::min(expected, tube_probe_ratio(n, n_tubes));
    CHECK(rep.density_minimum > 0.85 * expected);
    CHECK(rep.density_minimum < 1.05 * expected);
  }
  for (std::size_t i = 0; i + 1 < minima.size(); ++i)
    CHECK(minima[i + 1] < minima[i]);  // strictly finer pinching as N grows
  CHECK(minima[4] < 0.02);  // N = 6
  CHECK(minima[5] < 0.01);  // N = 7
}

TEST_CASE("domain spec json round trip") {
  DomainSpec spec = make_spec(Shape::thin_tubes, 1.0 / 128);
  spec.tube_count = 6;
  spec.exact_geometry = true;
  spec.seed = 17;
  const auto back = DomainSpec::from_json_text(spec.to_json_text());
  CHECK(back.shape == spec.shape);
  CHECK(back.h == spec.h);
  CHECK(back.tube_count == spec.tube_count);
  CHECK(back.exact_geometry == spec.exact_geometry);
  CHECK(back.seed == spec.seed);
  CHECK_THROWS_AS(DomainSpec::from_json_text(R"({"shape":"hexagon"})"),
                  std::invalid_argument);
  CHECK(parse_shape(shape_name(Shape::slit_disc)) == Shape::slit_disc);
}

TEST_CASE("mesh resolution guards") {
  CHECK_THROWS_AS(build_domain(make_spec(Shape::unit_square, 0.2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_domain(make_spec(Shape::unit_square, -1.0)),
                  std::invalid_argument);
  DomainSpec tubes = make_spec(Shape::thin_tubes, 1.0 / 64);
  tubes.tube_count = 0;
  CHECK_THROWS_AS(build_domain(tubes), std::invalid_argument);
}

TEST_CASE("custom polygon domains") {
  DomainSpec spec;
  spec.shape = Shape::custom_polygon;
  spec.h = 1.0 / 64;
  spec.polygon = {{0, 0}, {2, 0}, {2, 1}, {0, 1}};  // 2 x 1 box
  const auto d = build_domain(spec);
  CHECK(d.mu_total() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d.diam == doctest::Approx(std::sqrt(5.0)));
  CHECK(d.h_total() == doctest::Approx(pi / 2 * 6).epsilon(0.02));
  DomainSpec bad = spec;
  bad.polygon = {{0, 0}, {1, 0}};
  CHECK_THROWS_AS(build_domain(bad), std::invalid_argument);
}
