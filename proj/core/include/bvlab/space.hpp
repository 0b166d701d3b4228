#pragma once

// Finite discretizations of planar domains: weighted interior samples for
// the area measure, arc-length boundary samples recalibrated against the
// codimension-1 Hausdorff estimator, exact geometry backends, and the
// regularity audit (Ahlfors ratios, interior density, doubling).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bvlab/geometry.hpp"

namespace bvlab::space {

enum class Shape { unit_square, disc, slit_disc, l_shape, thin_tubes, custom_polygon };

std::string shape_name(Shape s);
Shape parse_shape(const std::string& name);

struct DomainSpec {
  Shape shape = Shape::unit_square;
  double h = 1.0 / 64.0;
  int tube_count = 0;            // thin_tubes only
  bool exact_geometry = false;   // thin_tubes: closed-form rectangle backend
  std::uint64_t seed = 0;
  std::vector<geom::Vec2> polygon;  // custom_polygon vertices

  static DomainSpec from_json_text(const std::string& text);
  std::string to_json_text() const;
};

// One boundary piece (straight segment or the full circle of a disc).
struct BoundaryEdge {
  geom::Segment seg{};   // valid when !is_circle
  bool is_circle = false;
  double circle_radius = 1.0;
  geom::Vec2 circle_center{};
  double length = 0.0;
  int first_sample = 0;  // contiguous sample range on this edge
  int sample_count = 0;
  int curve = 0;         // id of the boundary curve this edge belongs to
};

struct BoundaryCurve {
  int first_sample = 0;
  int sample_count = 0;
  bool closed = true;
};

struct Discretization {
  DomainSpec spec;
  double mesh_h = 0.0;
  double diam = 0.0;

  std::vector<geom::Vec2> interior_points;
  std::vector<double> mu_weights;
  std::vector<double> dist_to_boundary;  // exact distance to the complement

  std::vector<geom::Vec2> boundary_points;
  std::vector<double> h_weights;    // calibrated codim-1 weights
  std::vector<double> boundary_ds;  // raw arc length represented per sample
  std::vector<int> sample_edge;     // boundary sample -> edge index

  std::vector<BoundaryEdge> edges;
  std::vector<BoundaryCurve> curves;

  // Exact-geometry payload (thin-tubes): base rectangle then tubes 1..N.
  std::vector<geom::Rect> exact_rects;

  double mu_total() const;
  double h_total() const;

  // Ambient ball measure: planar Lebesgue.
  static double ball_measure(double r) { return M_PI * r * r; }

  // mu(B(z, r) ∩ Ω): interior-weight sum, or closed-form clipping in the
  // exact-geometry backend.
  double mu_ball_in_domain(geom::Vec2 z, double r) const;

  // Codim-1 mass of B(z, r) ∩ ∂Ω via the calibrated weights (grid mode) or
  // exact edge clipping scaled by the straight-edge covering constant.
  double h_ball(geom::Vec2 z, double r) const;

  bool exact_mode() const { return !exact_rects.empty(); }
};

Discretization build_domain(const DomainSpec& spec);

enum class SampleSet { interior, boundary };

// Sum of weights over masked samples; mask sized to the chosen sample set.
double measure_of(const Discretization& disc, std::span<const std::uint8_t> mask,
                  SampleSet set);

double dist_to_complement(const Discretization& disc, int interior_index);

struct HausdorffResult {
  double value = 0.0;  // estimate at the finest delta
  std::vector<std::pair<double, double>> per_delta;  // (delta, estimate)
};

// Covering estimate of the codimension-1 Hausdorff measure of the masked
// boundary set: greedy chains of radius-<delta balls along the boundary
// order, each ball contributing mu(B)/rad = pi*rad under planar Lebesgue.
HausdorffResult codim1_hausdorff(const Discretization& disc,
                                 std::span<const std::uint8_t> boundary_mask,
                                 std::span<const double> deltas);

struct AuditRow {
  int center = 0;        // boundary sample id (grid) or probe id (exact)
  geom::Vec2 point{};
  double r = 0.0;
  double mu_ball = 0.0;  // mu(B ∩ Ω)
  double h_ball = 0.0;   // codim-1 mass of B ∩ ∂Ω
  double ahlfors_ratio = 0.0;  // h_ball * r / mu(B)
  double density_ratio = 0.0;  // mu(B ∩ Ω) / mu(B)
};

struct AuditConfig {
  int max_centers = 200;
  std::uint64_t seed = 1;
  double ahlfors_lo = 0.2;
  double ahlfors_hi = 5.0;
  double spread_max = 25.0;
  double density_min = 0.2;
};

struct RegularityReport {
  std::vector<AuditRow> rows;
  double doubling_estimate = 0.0;
  double ahlfors_min = 0.0, ahlfors_max = 0.0;
  double density_minimum = 0.0;
  bool ahlfors_in_bounds = false;
  bool spread_ok = false;
  bool density_ok = false;
  void write_csv(std::string path) const;  // (x_id,r,mu_ball,h_ball,ahlfors_ratio,density_ratio)
  std::string csv_text() const;
};

RegularityReport regularity_audit(const Discretization& disc,
                                  std::span<const double> radii,
                                  const AuditConfig& cfg = {});

// Thin-tube closed-form helpers (exact mode): tube n is centered at 1/n^2
// with half-width 4^-n and height 2^-n above the base strip.
geom::Rect thin_tube_rect(int n);
double thin_tube_area(int n);

// Dyadic audit radii plus, per tube, the largest probe radius usable at the
// tube's top center without touching the base strip or a neighboring tube.
std::vector<double> thin_tube_audit_radii(int tube_count);

}  // namespace bvlab::space
