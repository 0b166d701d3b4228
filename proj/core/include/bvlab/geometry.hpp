#pragma once

// Planar geometry kernels shared by the lab: points, segments, polygon and
// disc clipping, bucketed radius queries, compensated sums, seeded RNG.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace bvlab::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline double dist2(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

struct Segment {
  Vec2 a, b;
};

Vec2 closest_point_on_segment(Vec2 p, const Segment& s);
double point_segment_distance(Vec2 p, const Segment& s);

struct Rect {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(Vec2 p) const {
    return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
  }
};

double polygon_area(std::span<const Vec2> poly);
bool point_in_polygon(Vec2 p, std::span<const Vec2> poly);

// Area of disc(c, r) ∩ polygon, signed by polygon orientation.  Decomposes
// the polygon into circular triangles against the disc center; handles
// nonconvex polygons.  Callers normally take std::abs.
double disc_polygon_area(Vec2 c, double r, std::span<const Vec2> poly);
double disc_rect_area(Vec2 c, double r, const Rect& rect);
double disc_disc_area(Vec2 c1, double r1, Vec2 c2, double r2);

// Length of segment ∩ closed disc(c, r).
double segment_in_disc_length(const Segment& s, Vec2 c, double r);

// Kahan-Babuska compensated accumulator for long reductions.
class KahanSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Uniform bucket grid for fixed-radius neighbor queries over a static
// point set.  Queries enumerate candidates cell-by-cell in index order.
class PointGrid {
 public:
  PointGrid() = default;
  PointGrid(std::span<const Vec2> pts, double cell);

  // fn(i) for every stored point with dist(pts[i], q) <= r, ascending i
  // within each visited cell.
  template <class F>
  void for_neighbors(Vec2 q, double r, F&& fn) const {
    if (cells_.empty()) return;
    const double r2 = r * r;
    const int cx0 = cell_index_x(q.x - r), cx1 = cell_index_x(q.x + r);
    const int cy0 = cell_index_y(q.y - r), cy1 = cell_index_y(q.y + r);
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx)
        for (int i : cells_[static_cast<std::size_t>(cy) * nx_ + cx])
          if (dist2(points_[i], q) <= r2) fn(i);
  }

  std::size_t size() const { return points_.size(); }

 private:
  int cell_index_x(double x) const;
  int cell_index_y(double y) const;

  std::vector<Vec2> points_;
  std::vector<std::vector<int>> cells_;
  double cell_ = 1.0, min_x_ = 0.0, min_y_ = 0.0;
  int nx_ = 0, ny_ = 0;
};

// Deterministic RNG: mt19937_64 bits mapped to doubles explicitly so that
// streams are reproducible independent of the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform() {  // [0, 1), 53 mantissa bits
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal();

  // Fisher-Yates with this stream.
  void shuffle(std::vector<int>& v);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bvlab::geom
