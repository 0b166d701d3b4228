#include "bvlab/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace bvlab::cover {

using geom::Vec2;

namespace {

// Level j with 2^(j-1) < r <= 2^j, exact for dyadic r.
int dyadic_level(double r) {
  int e = 0;
  const double m = std::frexp(r, &e);
  return m == 0.5 ? e - 1 : e;
}

long long bucket_key(int cx, int cy) {
  return (static_cast<long long>(cx) << 32) |
         static_cast<unsigned int>(static_cast<std::uint32_t>(cy));
}

// Hash buckets for dynamically accepted centers at a fixed separation.
class SeparationBuckets {
 public:
  explicit SeparationBuckets(double cell) : cell_(cell) {}

  bool blocked(Vec2 p, const std::vector<Vec2>& pts) const {
    const int cx = static_cast<int>(std::floor(p.x / cell_));
    const int cy = static_cast<int>(std::floor(p.y / cell_));
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const auto it = cells_.find(bucket_key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (int i : it->second)
          if (geom::dist(pts[i], p) < cell_) return true;
      }
    return false;
  }

  void insert(Vec2 p, int index) {
    const int cx = static_cast<int>(std::floor(p.x / cell_));
    const int cy = static_cast<int>(std::floor(p.y / cell_));
    cells_[bucket_key(cx, cy)].push_back(index);
  }

 private:
  double cell_;
  std::unordered_map<long long, std::vector<int>> cells_;
};

}  // namespace

WhitneyCover whitney_cover(const space::Discretization& disc) {
  const auto& pts = disc.interior_points;
  const int n = static_cast<int>(pts.size());

  std::vector<int> level(n);
  int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
  for (int i = 0; i < n; ++i) {
    level[i] = dyadic_level(disc.dist_to_boundary[i] / 8.0);
    lo = std::min(lo, level[i]);
    hi = std::max(hi, level[i]);
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
    if (pts[a].y != pts[b].y) return pts[a].y < pts[b].y;
    return a < b;
  });

  WhitneyCover cover;
  cover.min_level = lo;
  cover.max_level = hi;
  for (int j = hi; j >= lo; --j) {
    const double sep = std::ldexp(1.0, j - 1);
    SeparationBuckets accepted(sep);
    for (int idx : order) {
      if (level[idx] != j) continue;
      if (accepted.blocked(pts[idx], pts)) continue;
      accepted.insert(pts[idx], idx);
      WhitneyBall ball;
      ball.center = pts[idx];
      ball.radius = disc.dist_to_boundary[idx] / 8.0;
      ball.level = j;
      ball.center_index = idx;
      cover.balls.push_back(ball);
    }
  }

  // Anchor each ball at its nearest boundary sample and attach shadows.
  const geom::PointGrid bgrid(disc.boundary_points, 4.0 * disc.mesh_h);
  std::vector<WhitneyBall> kept;
  kept.reserve(cover.balls.size());
  for (WhitneyBall& b : cover.balls) {
    double search = 8.0 * b.radius + 2.0 * disc.mesh_h;
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    while (best < 0 && search < 4.0 * disc.diam) {
      bgrid.for_neighbors(b.center, search, [&](int i) {
        const double d = geom::dist(disc.boundary_points[i], b.center);
        if (d < best_d || (d == best_d && (best < 0 || i < best))) {
          best_d = d;
          best = i;
        }
      });
      search *= 2.0;
    }
    b.nearest_boundary = best;
    b.anchor = disc.boundary_points[best];
    bgrid.for_neighbors(b.anchor, b.radius, [&](int i) {
      if (geom::dist(disc.boundary_points[i], b.anchor) < b.radius)
        b.shadow.push_back(i);
    });
    bgrid.for_neighbors(b.anchor, 64.0 * b.radius, [&](int i) {
      if (geom::dist(disc.boundary_points[i], b.anchor) < 64.0 * b.radius)
        b.expanded_shadow.push_back(i);
    });
    std::sort(b.shadow.begin(), b.shadow.end());
    std::sort(b.expanded_shadow.begin(), b.expanded_shadow.end());
    if (b.shadow.empty()) {
      ++cover.dropped;
      continue;
    }
    kept.push_back(std::move(b));
  }
  cover.balls = std::move(kept);

  // Measured overlap constant of the doubled balls.
  std::vector<int> hits(n, 0);
  const geom::PointGrid igrid(pts, 2.0 * disc.mesh_h);
  for (const WhitneyBall& b : cover.balls)
    igrid.for_neighbors(b.center, 2.0 * b.radius, [&](int i) {
      if (geom::dist(pts[i], b.center) < 2.0 * b.radius) ++hits[i];
    });
  cover.max_overlap = *std::max_element(hits.begin(), hits.end());
  return cover;
}

std::string WhitneyCover::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const WhitneyBall& b : balls) {
    nlohmann::ordered_json jb;
    jb["p"] = {b.center.x, b.center.y};
    jb["r"] = b.radius;
    jb["j"] = b.level;
    jb["q"] = {b.anchor.x, b.anchor.y};
    arr.push_back(std::move(jb));
  }
  return arr.dump();
}

std::string WhitneyCover::levels_csv() const {
  std::unordered_map<int, int> counts;
  for (const WhitneyBall& b : balls) ++counts[b.level];
  std::string out = "level,count,max_overlap,dropped\n";
  for (int j = max_level; j >= min_level; --j) {
    const auto it = counts.find(j);
    if (it == counts.end()) continue;
    out += std::to_string(j) + ',' + std::to_string(it->second) + ',' +
           std::to_string(max_overlap) + ',' + std::to_string(dropped) + '\n';
  }
  return out;
}

PartitionOfUnity partition_of_unity(const space::Discretization& disc,
                                    const WhitneyCover& cover) {
  const auto& pts = disc.interior_points;
  const int n = static_cast<int>(pts.size());
  PartitionOfUnity pou;
  pou.tent_sum.assign(n, 0.0);
  pou.support.resize(cover.balls.size());

  const geom::PointGrid igrid(pts, 2.0 * disc.mesh_h);
  for (std::size_t b = 0; b < cover.balls.size(); ++b) {
    const WhitneyBall& ball = cover.balls[b];
    auto& sup = pou.support[b];
    igrid.for_neighbors(ball.center, 2.0 * ball.radius, [&](int i) {
      const double d = geom::dist(pts[i], ball.center);
      if (d >= 2.0 * ball.radius) return;
      const double tent = std::min(1.0, 2.0 - d / ball.radius);
      sup.emplace_back(i, tent);
      pou.tent_sum[i] += tent;
    });
    std::sort(sup.begin(), sup.end());
  }
  for (int i = 0; i < n; ++i)
    if (!(pou.tent_sum[i] > 0.0))
      throw std::logic_error("interior sample not covered by any doubled ball");
  for (auto& sup : pou.support)
    for (auto& [i, v] : sup) v /= pou.tent_sum[i];

  // Sampled steepness of each phi against neighboring samples (phi = 0 off
  // support), reported relative to 1/r.
  double worst = 0.0;
  const double reach = 1.5 * disc.mesh_h;
  for (std::size_t b = 0; b < cover.balls.size(); ++b) {
    const auto& sup = pou.support[b];
    auto phi_at = [&](int i) {
      const auto it = std::lower_bound(
          sup.begin(), sup.end(), i,
          [](const std::pair<int, double>& e, int key) { return e.first < key; });
      return it != sup.end() && it->first == i ? it->second : 0.0;
    };
    for (const auto& [i, phi] : sup)
      igrid.for_neighbors(pts[i], reach, [&](int k) {
        if (k == i) return;
        const double q = std::abs(phi - phi_at(k)) / geom::dist(pts[i], pts[k]);
        worst = std::max(worst, q * cover.balls[b].radius);
      });
  }
  pou.max_lip_times_r = worst;
  return pou;
}

NetResult greedy_net(std::span<const Vec2> pts, double r, double tau) {
  if (!(r > 0.0) || !(tau >= 1.0))
    throw std::invalid_argument("net needs r > 0 and tau >= 1");
  NetResult res;
  SeparationBuckets buckets(r);
  std::vector<Vec2> all(pts.begin(), pts.end());
  for (int i = 0; i < static_cast<int>(all.size()); ++i) {
    if (buckets.blocked(all[i], all)) continue;
    buckets.insert(all[i], i);
    res.centers.push_back(i);
  }
  // Overlap of the tau-inflated net balls, measured over the input points.
  const double cap = tau * r;
  for (const Vec2& p : all) {
    int count = 0;
    for (int c : res.centers)
      if (geom::dist(all[c], p) <= cap) ++count;
    res.max_overlap = std::max(res.max_overlap, count);
  }
  return res;
}

std::vector<std::uint8_t> layer_mask(const space::Discretization& disc,
                                     double inner, double outer) {
  if (!(inner >= 0.0) || !(outer > inner))
    throw std::invalid_argument("collar needs 0 <= inner < outer");
  std::vector<std::uint8_t> mask(disc.interior_points.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = disc.dist_to_boundary[i] >= inner && disc.dist_to_boundary[i] < outer;
  return mask;
}

}  // namespace bvlab::cover
