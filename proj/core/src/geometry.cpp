#include "bvlab/geometry.hpp"

#include <algorithm>

namespace bvlab::geom {

Vec2 closest_point_on_segment(Vec2 p, const Segment& s) {
  const Vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return s.a;
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return s.a + t * d;
}

double point_segment_distance(Vec2 p, const Segment& s) {
  return dist(p, closest_point_on_segment(p, s));
}

double polygon_area(std::span<const Vec2> poly) {
  KahanSum s;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) s.add(cross(poly[j], poly[i]));
  return 0.5 * s.value();
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const bool yi = poly[i].y > p.y, yj = poly[j].y > p.y;
    if (yi != yj) {
      const double xint = poly[j].x + (poly[i].x - poly[j].x) * (p.y - poly[j].y) /
                                          (poly[i].y - poly[j].y);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

namespace {

// Signed area of triangle (0, a, b) ∩ disc(0, r).  Sector terms pick up the
// parts of the cone between the rays 0→a and 0→b that lie outside the chord.
double circular_triangle_area(Vec2 a, Vec2 b, double r) {
  const auto sector = [r](Vec2 u, Vec2 v) {
    return 0.5 * r * r * std::atan2(cross(u, v), dot(u, v));
  };
  const double r2 = r * r;
  const bool a_in = dot(a, a) <= r2;
  const bool b_in = dot(b, b) <= r2;
  if (a_in && b_in) return 0.5 * cross(a, b);

  const Vec2 d = b - a;
  const double qa = dot(d, d);
  if (qa == 0.0) return 0.0;
  const double qb = 2.0 * dot(a, d);
  const double qc = dot(a, a) - r2;
  const double det = qb * qb - 4.0 * qa * qc;
  if (det <= 0.0) return sector(a, b);  // chord misses the circle
  const double sq = std::sqrt(det);
  const double t1 = (-qb - sq) / (2.0 * qa);
  const double t2 = (-qb + sq) / (2.0 * qa);

  if (a_in) {  // leaves the disc at t2
    const Vec2 q = a + t2 * d;
    return 0.5 * cross(a, q) + sector(q, b);
  }
  if (b_in) {  // enters the disc at t1
    const Vec2 q = a + t1 * d;
    return sector(a, q) + 0.5 * cross(q, b);
  }
  if (t1 > 0.0 && t2 < 1.0 && t1 < t2) {  // chord clips the disc
    const Vec2 q1 = a + t1 * d;
    const Vec2 q2 = a + t2 * d;
    return sector(a, q1) + 0.5 * cross(q1, q2) + sector(q2, b);
  }
  return sector(a, b);
}

}  // namespace

double disc_polygon_area(Vec2 c, double r, std::span<const Vec2> poly) {
  KahanSum s;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    s.add(circular_triangle_area(poly[j] - c, poly[i] - c, r));
  return s.value();
}

double disc_rect_area(Vec2 c, double r, const Rect& rect) {
  const Vec2 quad[4] = {{rect.x0, rect.y0}, {rect.x1, rect.y0},
                        {rect.x1, rect.y1}, {rect.x0, rect.y1}};
  return std::abs(disc_polygon_area(c, r, quad));
}

double disc_disc_area(Vec2 c1, double r1, Vec2 c2, double r2) {
  const double d = dist(c1, c2);
  if (d >= r1 + r2) return 0.0;
  const double rm = std::min(r1, r2);
  if (d <= std::abs(r1 - r2)) return M_PI * rm * rm;
  const double alpha = 2.0 * std::acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1));
  const double beta = 2.0 * std::acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2));
  return 0.5 * r1 * r1 * (alpha - std::sin(alpha)) +
         0.5 * r2 * r2 * (beta - std::sin(beta));
}

double segment_in_disc_length(const Segment& s, Vec2 c, double r) {
  const Vec2 a = s.a - c;
  const Vec2 d = s.b - s.a;
  const double qa = dot(d, d);
  if (qa == 0.0) return 0.0;
  const double qb = 2.0 * dot(a, d);
  const double qc = dot(a, a) - r * r;
  const double det = qb * qb - 4.0 * qa * qc;
  if (det <= 0.0) return 0.0;
  const double sq = std::sqrt(det);
  const double t1 = std::max(0.0, (-qb - sq) / (2.0 * qa));
  const double t2 = std::min(1.0, (-qb + sq) / (2.0 * qa));
  return t2 > t1 ? (t2 - t1) * std::sqrt(qa) : 0.0;
}

PointGrid::PointGrid(std::span<const Vec2> pts, double cell)
    : points_(pts.begin(), pts.end()), cell_(cell > 0 ? cell : 1.0) {
  if (points_.empty()) return;
  double max_x = points_[0].x, max_y = points_[0].y;
  min_x_ = points_[0].x;
  min_y_ = points_[0].y;
  for (const Vec2& p : points_) {
    min_x_ = std::min(min_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  nx_ = static_cast<int>((max_x - min_x_) / cell_) + 1;
  ny_ = static_cast<int>((max_y - min_y_) / cell_) + 1;
  cells_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
    const int cx = cell_index_x(points_[i].x);
    const int cy = cell_index_y(points_[i].y);
    cells_[static_cast<std::size_t>(cy) * nx_ + cx].push_back(i);
  }
}

int PointGrid::cell_index_x(double x) const {
  return std::clamp(static_cast<int>((x - min_x_) / cell_), 0, nx_ - 1);
}

int PointGrid::cell_index_y(double y) const {
  return std::clamp(static_cast<int>((y - min_y_) / cell_), 0, ny_ - 1);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 == 0.0);
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  spare_ = mag * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return mag * std::cos(2.0 * M_PI * u2);
}

void Rng::shuffle(std::vector<int>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(next_u64() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace bvlab::geom
