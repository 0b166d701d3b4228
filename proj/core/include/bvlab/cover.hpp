#pragma once

// Whitney-type ball covers of the discretized domain: dyadic-level centers
// with radius an eighth of the boundary distance, boundary shadows for each
// ball, the subordinate partition of unity, greedy nets, and collar masks.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bvlab/space.hpp"

namespace bvlab::cover {

struct WhitneyBall {
  geom::Vec2 center{};
  double radius = 0.0;        // dist(center, complement) / 8
  int level = 0;              // 2^(level-1) < radius <= 2^level
  int center_index = -1;      // interior sample the ball is anchored at
  int nearest_boundary = -1;  // boundary sample nearest the center (lowest id on ties)
  geom::Vec2 anchor{};        // position of that boundary sample
  std::vector<int> shadow;           // boundary samples within radius of the anchor
  std::vector<int> expanded_shadow;  // within 64 * radius
};

struct WhitneyCover {
  std::vector<WhitneyBall> balls;
  int min_level = 0;
  int max_level = 0;
  int max_overlap = 0;  // max number of doubled balls containing one sample
  int dropped = 0;      // balls discarded for an empty shadow

  std::string to_json() const;     // [{"p":[x,y],"r":..,"j":..,"q":[x,y]},..]
  std::string levels_csv() const;  // level,count,max_overlap,dropped
};

// Greedy per-level selection in lexicographic (x, y) order with separation
// 2^(level-1); every interior sample lands strictly inside a ball of its
// own level.  Shadows are attached to each kept ball.
WhitneyCover whitney_cover(const space::Discretization& disc);

struct PartitionOfUnity {
  // Per ball, the interior samples in the open doubled ball with the phi
  // value there, ordered by sample index.
  std::vector<std::vector<std::pair<int, double>>> support;
  std::vector<double> tent_sum;     // per interior sample, always >= 1
  double max_lip_times_r = 0.0;     // worst sampled slope of phi_b, scaled by r_b
};

// Tent functions max(0, min(1, 2 - d/r)) normalized to sum to one.
PartitionOfUnity partition_of_unity(const space::Discretization& disc,
                                    const WhitneyCover& cover);

struct NetResult {
  std::vector<int> centers;  // indices into the input point set
  int max_overlap = 0;       // max number of centers within tau*r of a point
};

// First-fit net: keep a point when no kept center is within r.  Kept
// centers are r-separated and every point is within r of one of them.
NetResult greedy_net(std::span<const geom::Vec2> pts, double r, double tau);

// Collar mask {x : inner <= dist(x, complement) < outer} over interior
// samples; requires 0 <= inner < outer.
std::vector<std::uint8_t> layer_mask(const space::Discretization& disc,
                                     double inner, double outer);

}  // namespace bvlab::cover
