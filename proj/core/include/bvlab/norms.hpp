#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bvlab/space.hpp"

namespace bvlab::norms {

// Which sample family of a discretization a field lives on.
enum class FieldDomain { interior, boundary };

// A scalar field sampled on the interior grid or on the boundary chain.
struct Field {
  FieldDomain domain = FieldDomain::interior;
  std::vector<double> values;
};

// Point list / weight list backing a field's domain.
const std::vector<geom::Vec2>& points_of(const space::Discretization& disc,
                                         FieldDomain domain);
const std::vector<double>& weights_of(const space::Discretization& disc,
                                      FieldDomain domain);

// Weighted L1 norm of f over its whole domain.
double l1_norm(const space::Discretization& disc, const Field& f);

// Weighted mean of f over the masked points; the mask must carry positive
// total weight.
double integral_mean(const space::Discretization& disc, const Field& f,
                     const std::vector<std::uint8_t>& mask);

// Largest pairwise slope |f(x) - f(y)| / d(x, y) over masked points
// (brute force; needs at least two of them).
double lip_constant(const space::Discretization& disc, const Field& f,
                    const std::vector<std::uint8_t>& mask);

// Local slope field: at each interior sample, the largest difference quotient
// against neighbours within neighbor_factor * mesh_h.  Samples with no
// neighbour in range get slope 0 and are counted.
struct PointwiseLip {
  std::vector<double> values;
  int isolated = 0;
};
PointwiseLip pointwise_lip(const space::Discretization& disc, const Field& u,
                           double neighbor_factor = 1.5);

// Upper-gradient style variation energy: sum of pointwise_lip times the cell
// weights, optionally restricted to a mask over interior samples.
double bv_energy(const space::Discretization& disc, const Field& u);
double bv_energy(const space::Discretization& disc, const Field& u,
                 const std::vector<std::uint8_t>& mask);

// Total variation of a cyclic sample sequence (sum of wrap-around absolute
// forward differences); the exact 1d variation of its piecewise-linear
// interpolant on a uniform circular grid.
double cyclic_total_variation(const std::vector<double>& samples);

// The three smoothness estimators: dyadic scale sums, a pair kernel, and
// greedy-net ball families of dyadic radii.
enum class BesovMethod { dyadic, kernel, fixed_balls };

struct ScaleRow {
  double scale = 0.0;
  double contribution = 0.0;
  int degenerate_balls = 0;  // balls holding a single sample at this scale
};

struct NormReport {
  std::string kind;    // "besov" or "jn"
  std::string method;  // "dyadic", "kernel", "fixed-balls", "packing"
  double theta = 0.0;
  double tau = 1.0;
  double scale_cap = 0.0;  // the R cutoff
  double value = 0.0;      // seminorm for besov, full norm for jn
  double l1_part = 0.0;
  double seminorm = 0.0;
  std::vector<ScaleRow> table;  // contributions sum to the seminorm

  std::string csv_text() const;  // scale,contribution,degenerate_ball_count
  std::string to_json() const;
};

// Smoothness-theta seminorm of a boundary field, scales capped at R.
// Requires theta in [0,1] and R in (2 * smallest sample gap, 2 * diam].
NormReport besov_seminorm(const space::Discretization& disc, const Field& f,
                          double theta, double R, BesovMethod method);

// Oscillation norm over tau-separated ball packings: L1 part plus the best
// packing sum found over dyadic radii and `restarts` shuffled greedy passes.
// The packing part is a certified lower bound for the true supremum.
NormReport jn_norm(const space::Discretization& disc, const Field& f,
                   double theta, double tau, double R, int restarts = 32,
                   std::uint64_t seed = 1);

}  // namespace bvlab::norms
