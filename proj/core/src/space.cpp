#include "bvlab/space.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace bvlab::space {

using geom::Vec2;

std::string shape_name(Shape s) {
  switch (s) {
    case Shape::unit_square: return "unit-square";
    case Shape::disc: return "disc";
    case Shape::slit_disc: return "slit-disc";
    case Shape::l_shape: return "l-shape";
    case Shape::thin_tubes: return "thin-tubes";
    case Shape::custom_polygon: return "custom-polygon";
  }
  return "unknown";
}

Shape parse_shape(const std::string& name) {
  if (name == "unit-square") return Shape::unit_square;
  if (name == "disc") return Shape::disc;
  if (name == "slit-disc") return Shape::slit_disc;
  if (name == "l-shape") return Shape::l_shape;
  if (name == "thin-tubes") return Shape::thin_tubes;
  if (name == "custom-polygon") return Shape::custom_polygon;
  throw std::invalid_argument("unknown shape: " + name);
}

DomainSpec DomainSpec::from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DomainSpec spec;
  spec.shape = parse_shape(j.at("shape").get<std::string>());
  if (j.contains("h")) spec.h = j.at("h").get<double>();
  if (j.contains("N")) spec.tube_count = j.at("N").get<int>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("exact")) spec.exact_geometry = j.at("exact").get<bool>();
  if (j.contains("vertices"))
    for (const auto& v : j.at("vertices"))
      spec.polygon.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  if (spec.shape == Shape::thin_tubes && spec.tube_count < 1)
    throw std::invalid_argument("thin-tubes requires N >= 1");
  return spec;
}

std::string DomainSpec::to_json_text() const {
  nlohmann::ordered_json j;
  j["shape"] = shape_name(shape);
  j["h"] = h;
  if (shape == Shape::thin_tubes) {
    j["N"] = tube_count;
    j["exact"] = exact_geometry;
  }
  j["seed"] = seed;
  if (!polygon.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const Vec2& v : polygon) arr.push_back({v.x, v.y});
    j["vertices"] = arr;
  }
  return j.dump();
}

geom::Rect thin_tube_rect(int n) {
  const double c = 1.0 / (static_cast<double>(n) * n);
  const double w = std::pow(4.0, -n);
  const double top = std::pow(2.0, -n);
  return {c - w, c + w, 0.0, top};
}

double thin_tube_area(int n) { return thin_tube_rect(n).area(); }

namespace {

double rect_distance(Vec2 p, const geom::Rect& r) {
  const double dx = std::max({r.x0 - p.x, 0.0, p.x - r.x1});
  const double dy = std::max({r.y0 - p.y, 0.0, p.y - r.y1});
  return std::hypot(dx, dy);
}

}  // namespace

std::vector<double> thin_tube_audit_radii(int tube_count) {
  std::vector<double> radii;
  for (int m = 2; m <= 7; ++m) radii.push_back(std::pow(2.0, -m));
  // Largest ball at each tube's top center that stays clear of the base
  // strip and of the neighboring tubes; the interior density at that probe
  // scales like (tube width) / radius and drives the audit minimum.
  for (int n = 1; n <= tube_count; ++n) {
    const geom::Rect t = thin_tube_rect(n);
    const Vec2 top{0.5 * (t.x0 + t.x1), t.y1};
    double r = t.height();
    if (n > 1) r = std::min(r, rect_distance(top, thin_tube_rect(n - 1)));
    if (n < tube_count) r = std::min(r, rect_distance(top, thin_tube_rect(n + 1)));
    radii.push_back(r * (1.0 - 1e-9));
  }
  std::sort(radii.begin(), radii.end(), std::greater<>());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  return radii;
}

namespace {

constexpr double kEdgeMassPerLength = M_PI / 2.0;  // straight-edge covering value

struct EdgePlan {
  geom::Segment seg{};
  bool is_circle = false;
  Vec2 circle_center{};
  double circle_radius = 1.0;
  int curve = 0;
};

struct ShapePlan {
  std::vector<EdgePlan> edges;
  std::vector<bool> curve_closed;
  double min_x = 0, max_x = 1, min_y = 0, max_y = 1;  // sampling bbox
  double diam = 1;
};

void add_polygon_edges(ShapePlan& plan, const std::vector<Vec2>& poly, int curve) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    EdgePlan e;
    e.seg = {poly[i], poly[(i + 1) % poly.size()]};
    e.curve = curve;
    plan.edges.push_back(e);
  }
}

std::vector<Vec2> square_poly() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

std::vector<Vec2> l_shape_poly() {
  return {{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}};
}

// Tubes wide enough for the grid: at least two sample columns across.
bool tube_resolved(int n, double h) { return 2.0 * std::pow(4.0, -n) >= 2.0 * h; }

ShapePlan plan_thin_tubes(const DomainSpec& spec) {
  ShapePlan plan;
  plan.curve_closed = {true};
  std::vector<int> included;
  for (int n = 1; n <= spec.tube_count; ++n)
    if (spec.exact_geometry || tube_resolved(n, spec.h)) included.push_back(n);

  const Vec2 bl{-1, -1}, br{2, -1}, tr{2, 0}, tl{-1, 0};
  auto push = [&plan](Vec2 a, Vec2 b) {
    EdgePlan e;
    e.seg = {a, b};
    plan.edges.push_back(e);
  };
  push(bl, br);  // bottom
  push(br, tr);  // right
  // top edge pieces, walking right to left with a detour around each tube
  double cursor = 2.0;
  for (int n : included) {  // tube centers 1/n^2 are decreasing in n
    const geom::Rect t = thin_tube_rect(n);
    push({cursor, 0}, {t.x1, 0});
    push({t.x1, 0}, {t.x1, t.y1});
    push({t.x1, t.y1}, {t.x0, t.y1});
    push({t.x0, t.y1}, {t.x0, 0});
    cursor = t.x0;
  }
  push({cursor, 0}, tl);
  push(tl, bl);  // left

  plan.min_x = -1;
  plan.max_x = 2;
  plan.min_y = -1;
  plan.max_y = included.empty() ? 0.0 : std::pow(2.0, -included.front());
  plan.diam = std::sqrt(10.0);  // corner (-1,-1) to corner (2,0)
  return plan;
}

ShapePlan make_plan(const DomainSpec& spec) {
  ShapePlan plan;
  plan.curve_closed = {true};
  switch (spec.shape) {
    case Shape::unit_square:
      add_polygon_edges(plan, square_poly(), 0);
      plan.diam = std::sqrt(2.0);
      break;
    case Shape::l_shape:
      add_polygon_edges(plan, l_shape_poly(), 0);
      plan.diam = std::sqrt(2.0);
      break;
    case Shape::custom_polygon: {
      if (spec.polygon.size() < 3)
        throw std::invalid_argument("custom-polygon needs at least 3 vertices");
      std::vector<Vec2> poly = spec.polygon;
      if (geom::polygon_area(poly) < 0) std::reverse(poly.begin(), poly.end());
      if (std::abs(geom::polygon_area(poly)) == 0.0)
        throw std::invalid_argument("custom-polygon is degenerate");
      add_polygon_edges(plan, poly, 0);
      plan.min_x = plan.max_x = poly[0].x;
      plan.min_y = plan.max_y = poly[0].y;
      plan.diam = 0;
      for (const Vec2& p : poly) {
        plan.min_x = std::min(plan.min_x, p.x);
        plan.max_x = std::max(plan.max_x, p.x);
        plan.min_y = std::min(plan.min_y, p.y);
        plan.max_y = std::max(plan.max_y, p.y);
        for (const Vec2& q : poly) plan.diam = std::max(plan.diam, geom::dist(p, q));
      }
      break;
    }
    case Shape::disc:
    case Shape::slit_disc: {
      EdgePlan circle;
      circle.is_circle = true;
      circle.circle_center = {0, 0};
      circle.circle_radius = 1.0;
      plan.edges.push_back(circle);
      if (spec.shape == Shape::slit_disc) {
        EdgePlan slit;
        slit.seg = {{0, 0}, {1, 0}};
        slit.curve = 1;
        plan.edges.push_back(slit);
        plan.curve_closed.push_back(false);
      }
      plan.min_x = plan.min_y = -1;
      plan.max_x = plan.max_y = 1;
      plan.diam = 2.0;
      break;
    }
    case Shape::thin_tubes:
      return plan_thin_tubes(spec);
  }
  return plan;
}

double edge_length(const EdgePlan& e) {
  if (e.is_circle) return 2.0 * M_PI * e.circle_radius;
  return geom::dist(e.seg.a, e.seg.b);
}

Vec2 edge_point(const EdgePlan& e, double arc) {
  if (e.is_circle) {
    const double th = arc / e.circle_radius;
    return e.circle_center + e.circle_radius * Vec2{std::cos(th), std::sin(th)};
  }
  const double len = edge_length(e);
  const double t = len > 0 ? arc / len : 0.0;
  return e.seg.a + t * (e.seg.b - e.seg.a);
}

double distance_to_edge(Vec2 p, const EdgePlan& e) {
  if (e.is_circle)
    return std::abs(e.circle_radius - geom::dist(p, e.circle_center));
  return geom::point_segment_distance(p, e.seg);
}

struct InsideTest {
  const DomainSpec* spec;
  std::vector<Vec2> poly;          // polygonal shapes
  std::vector<geom::Rect> rects;   // thin tubes (base first)

  bool operator()(Vec2 p) const {
    switch (spec->shape) {
      case Shape::disc:
        return geom::norm(p) < 1.0;
      case Shape::slit_disc:
        return geom::norm(p) < 1.0 &&
               !(p.y == 0.0 && p.x >= 0.0 && p.x < 1.0);
      case Shape::thin_tubes: {
        for (const geom::Rect& r : rects)
          if (r.contains(p)) return true;
        // tube mouths: points on y == 0 inside a tube's open span
        if (p.y == 0.0)
          for (std::size_t i = 1; i < rects.size(); ++i)
            if (p.x > rects[i].x0 && p.x < rects[i].x1) return true;
        return false;
      }
      default:
        return geom::point_in_polygon(p, poly);
    }
  }
};

// Covering value of an index-ordered set of boundary samples with balls of
// radius delta.  Each maximal run of samples with chord gaps at most
// 2*delta stands for the stretch of boundary it was sampled from, and the
// run's polyline span is tiled by ceil(span / (2*delta)) balls.  Chord
// distance dominates straight-line distance, so the tiling is an honest
// Euclidean cover; a straight stretch of length L costs pi*delta*ceil(L/(2*delta)),
// which converges to the infimum (pi/2)L independently of the sample spacing.
double covering_estimate(const std::vector<Vec2>& pts,
                         const std::vector<int>& samples, double delta) {
  double balls = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    double span = 0.0;
    std::size_t j = i;
    while (j + 1 < samples.size()) {
      const double gap = geom::dist(pts[samples[j + 1]], pts[samples[j]]);
      if (gap > 2.0 * delta) break;
      span += gap;
      ++j;
    }
    balls += std::max(1.0, std::ceil(span / (2.0 * delta) - 1e-9));
    i = j + 1;
  }
  return balls * M_PI * delta;
}

}  // namespace

Discretization build_domain(const DomainSpec& spec) {
  if (spec.h <= 0) throw std::invalid_argument("mesh h must be positive");
  if (spec.h > 0.125)
    throw std::invalid_argument("mesh too coarse: h cannot resolve requested geometry");
  if (spec.shape == Shape::thin_tubes && spec.tube_count < 1)
    throw std::invalid_argument("thin-tubes requires N >= 1");
  if (spec.shape == Shape::thin_tubes && !spec.exact_geometry &&
      !tube_resolved(1, spec.h))
    throw std::invalid_argument("mesh too coarse: h cannot resolve requested geometry");

  const ShapePlan plan = make_plan(spec);

  Discretization d;
  d.spec = spec;
  d.mesh_h = spec.h;
  d.diam = plan.diam;

  InsideTest inside{&spec, {}, {}};
  if (spec.shape == Shape::unit_square) inside.poly = square_poly();
  if (spec.shape == Shape::l_shape) inside.poly = l_shape_poly();
  if (spec.shape == Shape::custom_polygon) {
    inside.poly = spec.polygon;
    if (geom::polygon_area(inside.poly) < 0)
      std::reverse(inside.poly.begin(), inside.poly.end());
  }
  if (spec.shape == Shape::thin_tubes) {
    inside.rects.push_back({-1, 2, -1, 0});
    for (int n = 1; n <= spec.tube_count; ++n)
      if (spec.exact_geometry || tube_resolved(n, spec.h))
        inside.rects.push_back(thin_tube_rect(n));
    if (spec.exact_geometry) {
      d.exact_rects.push_back({-1, 2, -1, 0});
      for (int n = 1; n <= spec.tube_count; ++n)
        d.exact_rects.push_back(thin_tube_rect(n));
    }
  }

  // Interior samples: uniform cell centers with mu-weight h^2.
  const double h = spec.h;
  const int nx = static_cast<int>(std::ceil((plan.max_x - plan.min_x) / h));
  const int ny = static_cast<int>(std::ceil((plan.max_y - plan.min_y) / h));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const Vec2 p{plan.min_x + (ix + 0.5) * h, plan.min_y + (iy + 0.5) * h};
      if (!inside(p)) continue;
      double dist = std::numeric_limits<double>::infinity();
      for (const EdgePlan& e : plan.edges) dist = std::min(dist, distance_to_edge(p, e));
      d.interior_points.push_back(p);
      d.mu_weights.push_back(h * h);
      d.dist_to_boundary.push_back(dist);
    }
  }
  if (d.interior_points.empty())
    throw std::invalid_argument("mesh too coarse: no interior samples");

  // Boundary samples: midpoint-spaced along each edge at spacing ~h.
  int curve_count = static_cast<int>(plan.curve_closed.size());
  d.curves.resize(curve_count);
  std::vector<int> curve_first(curve_count, -1);
  for (const EdgePlan& ep : plan.edges) {
    const double len = edge_length(ep);
    int count = std::max(1, static_cast<int>(std::lround(len / h)));
    // Circles get an odd sample count so that dyadic test signals sampled at
    // the boundary points never alias against the sampling lattice.
    if (ep.is_circle && count % 2 == 0) ++count;
    BoundaryEdge edge;
    edge.seg = ep.seg;
    edge.is_circle = ep.is_circle;
    edge.circle_center = ep.circle_center;
    edge.circle_radius = ep.circle_radius;
    edge.length = len;
    edge.curve = ep.curve;
    edge.first_sample = static_cast<int>(d.boundary_points.size());
    edge.sample_count = count;
    const double ds = len / count;
    for (int i = 0; i < count; ++i) {
      d.boundary_points.push_back(edge_point(ep, (i + 0.5) * ds));
      d.boundary_ds.push_back(ds);
      d.sample_edge.push_back(static_cast<int>(d.edges.size()));
    }
    if (curve_first[ep.curve] < 0) curve_first[ep.curve] = edge.first_sample;
    d.curves[ep.curve].sample_count += count;
    d.edges.push_back(edge);
  }
  for (int c = 0; c < curve_count; ++c) {
    d.curves[c].first_sample = std::max(0, curve_first[c]);
    d.curves[c].closed = plan.curve_closed[c];
  }

  // Calibrate h-weights edge by edge so that their sum over an edge equals
  // the covering estimate of that edge (short edges fall back to the
  // straight-edge value pi/2 per unit length).
  d.h_weights.resize(d.boundary_points.size());
  for (const BoundaryEdge& edge : d.edges) {
    double mass;
    if (edge.length >= 4.0 * h) {
      const double delta =
          std::clamp(edge.length / 16.0, 2.0 * h, edge.length / 2.0);
      std::vector<int> idx(edge.sample_count);
      for (int i = 0; i < edge.sample_count; ++i) idx[i] = edge.first_sample + i;
      mass = covering_estimate(d.boundary_points, idx, delta);
    } else {
      mass = kEdgeMassPerLength * edge.length;
    }
    for (int i = 0; i < edge.sample_count; ++i) {
      const int s = edge.first_sample + i;
      d.h_weights[s] = mass * (d.boundary_ds[s] / edge.length);
    }
  }

  return d;
}

double Discretization::mu_total() const {
  geom::KahanSum s;
  for (double w : mu_weights) s.add(w);
  return s.value();
}

double Discretization::h_total() const {
  geom::KahanSum s;
  for (double w : h_weights) s.add(w);
  return s.value();
}

double Discretization::mu_ball_in_domain(Vec2 z, double r) const {
  if (exact_mode()) {
    double area = 0.0;
    for (const geom::Rect& rect : exact_rects) area += geom::disc_rect_area(z, r, rect);
    return area;
  }
  if (spec.shape == Shape::disc || spec.shape == Shape::slit_disc) {
    double area = geom::disc_disc_area(z, r, {0, 0}, 1.0);
    if (spec.shape == Shape::slit_disc) return area;  // slit has measure zero
    return area;
  }
  geom::KahanSum s;
  const double r2 = r * r;
  for (std::size_t i = 0; i < interior_points.size(); ++i)
    if (geom::dist2(interior_points[i], z) <= r2) s.add(mu_weights[i]);
  return s.value();
}

double Discretization::h_ball(Vec2 z, double r) const {
  if (exact_mode()) {
    double len = 0.0;
    for (const BoundaryEdge& e : edges)
      if (!e.is_circle) len += geom::segment_in_disc_length(e.seg, z, r);
    return kEdgeMassPerLength * len;
  }
  geom::KahanSum s;
  const double r2 = r * r;
  for (std::size_t i = 0; i < boundary_points.size(); ++i)
    if (geom::dist2(boundary_points[i], z) <= r2) s.add(h_weights[i]);
  return s.value();
}

double measure_of(const Discretization& disc, std::span<const std::uint8_t> mask,
                  SampleSet set) {
  const auto& weights = set == SampleSet::interior ? disc.mu_weights : disc.h_weights;
  if (mask.size() != weights.size())
    throw std::invalid_argument("mask length does not match sample set");
  geom::KahanSum s;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (mask[i]) s.add(weights[i]);
  return s.value();
}

double dist_to_complement(const Discretization& disc, int interior_index) {
  if (interior_index < 0 ||
      interior_index >= static_cast<int>(disc.interior_points.size()))
    throw std::invalid_argument("interior index out of range");
  return disc.dist_to_boundary[interior_index];
}

HausdorffResult codim1_hausdorff(const Discretization& disc,
                                 std::span<const std::uint8_t> boundary_mask,
                                 std::span<const double> deltas) {
  if (boundary_mask.size() != disc.boundary_points.size())
    throw std::invalid_argument("mask length does not match boundary samples");
  if (deltas.empty()) throw std::invalid_argument("delta sequence is empty");
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
    if (deltas[i] <= deltas[i + 1])
      throw std::invalid_argument("delta sequence must be strictly decreasing");
  if (deltas.back() < 2.0 * disc.mesh_h)
    throw std::invalid_argument("delta below boundary sampling resolution");

  std::vector<int> samples;
  for (std::size_t i = 0; i < boundary_mask.size(); ++i)
    if (boundary_mask[i]) samples.push_back(static_cast<int>(i));

  HausdorffResult res;
  if (samples.empty()) {
    for (double delta : deltas) res.per_delta.emplace_back(delta, 0.0);
    res.value = 0.0;
    return res;
  }
  for (double delta : deltas)
    res.per_delta.emplace_back(delta,
                               covering_estimate(disc.boundary_points, samples, delta));
  res.value = res.per_delta.back().second;
  return res;
}

namespace {

void append_csv_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string RegularityReport::csv_text() const {
  std::string out = "x_id,r,mu_ball,h_ball,ahlfors_ratio,density_ratio\n";
  for (const AuditRow& row : rows) {
    out += std::to_string(row.center);
    out += ',';
    append_csv_double(out, row.r);
    out += ',';
    append_csv_double(out, row.mu_ball);
    out += ',';
    append_csv_double(out, row.h_ball);
    out += ',';
    append_csv_double(out, row.ahlfors_ratio);
    out += ',';
    append_csv_double(out, row.density_ratio);
    out += '\n';
  }
  return out;
}

void RegularityReport::write_csv(std::string path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << csv_text();
}

RegularityReport regularity_audit(const Discretization& disc,
                                  std::span<const double> radii,
                                  const AuditConfig& cfg) {
  if (radii.empty()) throw std::invalid_argument("audit needs at least one radius");
  const double lo = disc.exact_mode() ? 0.0 : 4.0 * disc.mesh_h;
  std::vector<double> valid;
  for (double r : radii)
    if (r > lo && r <= disc.diam / 2.0) valid.push_back(r);
  if (valid.empty())
    throw std::invalid_argument("no audit radius within [4h, diam/2]");

  // Boundary centers: keep every sample on short edges (tube tops and walls
  // would be missed by subsampling), subsample the rest deterministically.
  std::vector<int> centers;
  std::vector<int> rest;
  for (std::size_t i = 0; i < disc.boundary_points.size(); ++i) {
    if (disc.edges[disc.sample_edge[i]].sample_count <= 20)
      centers.push_back(static_cast<int>(i));
    else
      rest.push_back(static_cast<int>(i));
  }
  if (static_cast<int>(centers.size() + rest.size()) > cfg.max_centers) {
    geom::Rng rng(cfg.seed);
    rng.shuffle(rest);
    const int keep = std::max(0, cfg.max_centers - static_cast<int>(centers.size()));
    rest.resize(std::min<std::size_t>(rest.size(), keep));
    std::sort(rest.begin(), rest.end());
  }
  centers.insert(centers.end(), rest.begin(), rest.end());
  std::sort(centers.begin(), centers.end());

  RegularityReport rep;
  rep.ahlfors_min = std::numeric_limits<double>::infinity();
  rep.ahlfors_max = 0.0;
  rep.density_minimum = std::numeric_limits<double>::infinity();
  for (int c : centers) {
    const Vec2 z = disc.boundary_points[c];
    for (double r : valid) {
      AuditRow row;
      row.center = c;
      row.point = z;
      row.r = r;
      row.mu_ball = disc.mu_ball_in_domain(z, r);
      row.h_ball = disc.h_ball(z, r);
      const double ambient = Discretization::ball_measure(r);
      row.ahlfors_ratio = row.h_ball * r / ambient;
      row.density_ratio = row.mu_ball / ambient;
      rep.ahlfors_min = std::min(rep.ahlfors_min, row.ahlfors_ratio);
      rep.ahlfors_max = std::max(rep.ahlfors_max, row.ahlfors_ratio);
      rep.density_minimum = std::min(rep.density_minimum, row.density_ratio);
      rep.rows.push_back(row);
    }
  }

  // Doubling of the ambient measure sampled away from the boundary, where
  // B(z, 2r) stays inside the domain and the discrete sums see full balls.
  double doubling = 0.0;
  geom::Rng rng(cfg.seed + 1);
  std::vector<int> interior_ids(disc.interior_points.size());
  for (std::size_t i = 0; i < interior_ids.size(); ++i)
    interior_ids[i] = static_cast<int>(i);
  rng.shuffle(interior_ids);
  int used = 0;
  for (int id : interior_ids) {
    if (used >= cfg.max_centers) break;
    bool usable = false;
    for (double r : valid)
      if (disc.dist_to_boundary[id] >= 2.0 * r) usable = true;
    if (!usable) continue;
    ++used;
    for (double r : valid) {
      if (disc.dist_to_boundary[id] < 2.0 * r) continue;
      const double small = disc.mu_ball_in_domain(disc.interior_points[id], r);
      const double big = disc.mu_ball_in_domain(disc.interior_points[id], 2.0 * r);
      if (small > 0.0) doubling = std::max(doubling, big / small);
    }
  }
  rep.doubling_estimate = doubling;

  rep.ahlfors_in_bounds =
      rep.ahlfors_min >= cfg.ahlfors_lo && rep.ahlfors_max <= cfg.ahlfors_hi;
  rep.spread_ok = rep.ahlfors_min > 0.0 &&
                  rep.ahlfors_max / rep.ahlfors_min < cfg.spread_max;
  rep.density_ok = rep.density_minimum >= cfg.density_min;
  return rep;
}

}  // namespace bvlab::space
