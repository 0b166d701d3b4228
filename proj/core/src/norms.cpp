#include "bvlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "bvlab/cover.hpp"

namespace bvlab::norms {

const std::vector<geom::Vec2>& points_of(const space::Discretization& disc,
                                         FieldDomain domain) {
  return domain == FieldDomain::interior ? disc.interior_points
                                         : disc.boundary_points;
}

const std::vector<double>& weights_of(const space::Discretization& disc,
                                      FieldDomain domain) {
  return domain == FieldDomain::interior ? disc.mu_weights : disc.h_weights;
}

namespace {

void validate(const space::Discretization& disc, const Field& f) {
  if (f.values.size() != points_of(disc, f.domain).size())
    throw std::invalid_argument("field length does not match its point family");
}

// smallest chord between consecutive samples along any boundary curve; the
// finest scale at which ball averages can see a second sample
double min_sample_gap(const space::Discretization& disc) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : disc.curves) {
    if (c.sample_count < 2) continue;
    for (int i = 0; i < c.sample_count; ++i) {
      if (i + 1 == c.sample_count && !c.closed) break;
      const int a = c.first_sample + i;
      const int b = c.first_sample + (i + 1) % c.sample_count;
      best = std::min(best, geom::dist(disc.boundary_points[a],
                                       disc.boundary_points[b]));
    }
  }
  return best;
}

// mean-oscillation integral over closed balls of radius t; lone-sample balls
// contribute zero and are tallied
double scale_integral(const std::vector<geom::Vec2>& pts,
                      const std::vector<double>& w,
                      const std::vector<double>& f, double t,
                      int* degenerate) {
  geom::KahanSum outer;
  for (std::size_t x = 0; x < pts.size(); ++x) {
    double num = 0.0, den = 0.0;
    bool lone = true;
    for (std::size_t y = 0; y < pts.size(); ++y) {
      const double d = geom::dist(pts[x], pts[y]);
      if (d > t) continue;
      den += w[y];
      if (y != x) {
        num += w[y] * std::abs(f[y] - f[x]);
        lone = false;
      }
    }
    if (lone)
      ++*degenerate;
    else
      outer.add(w[x] * num / den);
  }
  return outer.value();
}

// dyadic scales 2^l covering (2 * gap, R]; empty when the window holds no
// power of two
std::pair<int, int> scale_range(double gap, double R) {
  int lmax = 0;
  while (std::ldexp(1.0, lmax + 1) <= R) ++lmax;
  while (std::ldexp(1.0, lmax) > R) --lmax;
  int lmin = lmax;
  while (std::ldexp(1.0, lmin - 1) >= 2.0 * gap) --lmin;
  return {lmin, lmax};
}

NormReport besov_dyadic(const space::Discretization& disc, const Field& f,
                        double theta, double R, double gap) {
  const auto& pts = points_of(disc, f.domain);
  const auto& w = weights_of(disc, f.domain);
  const auto [lmin, lmax] = scale_range(gap, R);
  if (lmin > lmax)
    throw std::invalid_argument("scale window holds no dyadic scale");
  NormReport rep;
  rep.kind = "besov";
  rep.method = "dyadic";
  rep.theta = theta;
  rep.scale_cap = R;
  rep.l1_part = l1_norm(disc, f);
  geom::KahanSum total;
  for (int l = lmin; l <= lmax; ++l) {
    const double t = std::ldexp(1.0, l);
    int deg = 0;
    const double a = scale_integral(pts, w, f.values, t, &deg);
    const double contrib = std::pow(2.0, -l * theta) * a;
    rep.table.push_back({t, contrib, deg});
    total.add(contrib);
  }
  rep.seminorm = total.value();
  rep.value = rep.seminorm;
  return rep;
}

NormReport besov_kernel(const space::Discretization& disc, const Field& f,
                        double theta, double R) {
  const auto& pts = points_of(disc, f.domain);
  const auto& w = weights_of(disc, f.domain);
  const std::size_t n = pts.size();
  // per-scale accumulation keyed by the dyadic level of the pair distance
  std::map<int, std::pair<geom::KahanSum, int>> buckets;
  geom::KahanSum total;
  std::vector<int> order(n);
  std::vector<double> dist_to(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y)
      dist_to[y] = geom::dist(pts[x], pts[y]);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return dist_to[a] < dist_to[b]; });
    // walk outward keeping the running closed-ball mass; equal distances
    // enter the mass together before their terms are added
    double mass = 0.0;
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j < n && dist_to[order[j]] == dist_to[order[i]]) ++j;
      for (std::size_t k = i; k < j; ++k) mass += w[order[k]];
      const double dxy = dist_to[order[i]];
      if (dxy > 0.0 && dxy < R) {
        int level = 0;
        while (std::ldexp(1.0, level) < dxy) ++level;
        while (std::ldexp(1.0, level - 1) >= dxy) --level;
        for (std::size_t k = i; k < j; ++k) {
          const int y = order[k];
          const double term = w[x] * w[y] * std::abs(f.values[y] - f.values[x]) /
                              (mass * std::pow(dxy, theta));
          total.add(term);
          buckets[level].first.add(term);
        }
      }
      i = j;
    }
  }
  NormReport rep;
  rep.kind = "besov";
  rep.method = "kernel";
  rep.theta = theta;
  rep.scale_cap = R;
  rep.l1_part = l1_norm(disc, f);
  for (const auto& [level, cell] : buckets)
    rep.table.push_back({std::ldexp(1.0, level), cell.first.value(), cell.second});
  rep.seminorm = total.value();
  rep.value = rep.seminorm;
  return rep;
}

NormReport besov_fixed_balls(const space::Discretization& disc, const Field& f,
                             double theta, double R, double gap) {
  const auto& pts = points_of(disc, f.domain);
  const auto& w = weights_of(disc, f.domain);
  NormReport rep;
  rep.kind = "besov";
  rep.method = "fixed-balls";
  rep.theta = theta;
  rep.scale_cap = R;
  rep.l1_part = l1_norm(disc, f);
  geom::KahanSum total;
  for (int k = 0; k <= 40; ++k) {
    const double rad = std::ldexp(R, -k);  // net radius = ball radius
    if (rad < gap) break;
    const auto net = cover::greedy_net(pts, rad, 2.0);
    geom::KahanSum level;
    int deg = 0;
    for (int c : net.centers) {
      double mass = 0.0, mean = 0.0;
      int hits = 0;
      for (std::size_t y = 0; y < pts.size(); ++y) {
        if (geom::dist(pts[c], pts[y]) > rad) continue;
        mass += w[y];
        mean += w[y] * f.values[y];
        ++hits;
      }
      if (hits < 2) {
        ++deg;
        continue;
      }
      mean /= mass;
      geom::KahanSum osc;
      for (std::size_t y = 0; y < pts.size(); ++y)
        if (geom::dist(pts[c], pts[y]) <= rad)
          osc.add(w[y] * std::abs(f.values[y] - mean));
      level.add(osc.value());
    }
    const double contrib = std::pow(rad, -theta) * level.value();
    rep.table.push_back({rad, contrib, deg});
    total.add(contrib);
  }
  rep.seminorm = total.value();
  rep.value = rep.seminorm;
  return rep;
}

}  // namespace

double l1_norm(const space::Discretization& disc, const Field& f) {
  validate(disc, f);
  const auto& w = weights_of(disc, f.domain);
  geom::KahanSum s;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    s.add(w[i] * std::abs(f.values[i]));
  return s.value();
}

double integral_mean(const space::Discretization& disc, const Field& f,
                     const std::vector<std::uint8_t>& mask) {
  validate(disc, f);
  const auto& w = weights_of(disc, f.domain);
  if (mask.size() != f.values.size())
    throw std::invalid_argument("mask length does not match the field");
  geom::KahanSum num, den;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (!mask[i]) continue;
    num.add(w[i] * f.values[i]);
    den.add(w[i]);
  }
  if (!(den.value() > 0.0))
    throw std::invalid_argument("mean over a zero-weight set");
  return num.value() / den.value();
}

double lip_constant(const space::Discretization& disc, const Field& f,
                    const std::vector<std::uint8_t>& mask) {
  validate(disc, f);
  const auto& pts = points_of(disc, f.domain);
  if (mask.size() != f.values.size())
    throw std::invalid_argument("mask length does not match the field");
  std::vector<int> idx;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) idx.push_back(static_cast<int>(i));
  if (idx.size() < 2)
    throw std::invalid_argument("slope needs at least two masked points");
  double best = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const double d = geom::dist(pts[idx[a]], pts[idx[b]]);
      if (d > 0.0)
        best = std::max(best,
                        std::abs(f.values[idx[a]] - f.values[idx[b]]) / d);
    }
  return best;
}

PointwiseLip pointwise_lip(const space::Discretization& disc, const Field& u,
                           double neighbor_factor) {
  validate(disc, u);
  if (u.domain != FieldDomain::interior)
    throw std::invalid_argument("pointwise slope needs an interior field");
  const auto& pts = disc.interior_points;
  const double radius = neighbor_factor * disc.mesh_h;
  geom::PointGrid grid(pts, disc.mesh_h);
  PointwiseLip out;
  out.values.assign(pts.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = 0.0;
    bool seen = false;
    grid.for_neighbors(pts[i], radius, [&](int j) {
      if (static_cast<std::size_t>(j) == i) return;
      const double d = geom::dist(pts[i], pts[j]);
      best = std::max(best, std::abs(u.values[j] - u.values[i]) / d);
      seen = true;
    });
    if (!seen) ++out.isolated;
    out.values[i] = best;
  }
  return out;
}

double bv_energy(const space::Discretization& disc, const Field& u) {
  const std::vector<std::uint8_t> all(disc.interior_points.size(), 1);
  return bv_energy(disc, u, all);
}

double bv_energy(const space::Discretization& disc, const Field& u,
                 const std::vector<std::uint8_t>& mask) {
  if (mask.size() != disc.interior_points.size())
    throw std::invalid_argument("mask length does not match the interior grid");
  const auto lip = pointwise_lip(disc, u);
  geom::KahanSum s;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) s.add(lip.values[i] * disc.mu_weights[i]);
  return s.value();
}

double cyclic_total_variation(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n < 2) return 0.0;
  geom::KahanSum s;
  for (std::size_t i = 0; i < n; ++i)
    s.add(std::abs(samples[(i + 1) % n] - samples[i]));
  return s.value();
}

NormReport besov_seminorm(const space::Discretization& disc, const Field& f,
                          double theta, double R, BesovMethod method) {
  validate(disc, f);
  if (f.domain != FieldDomain::boundary)
    throw std::invalid_argument("smoothness seminorms live on boundary fields");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("smoothness must lie in [0, 1]");
  const double gap = min_sample_gap(disc);
  if (!(R > 2.0 * gap && R <= 2.0 * disc.diam))
    throw std::invalid_argument("scale cap outside (2*sample gap, 2*diam]");
  switch (method) {
    case BesovMethod::dyadic:
      return besov_dyadic(disc, f, theta, R, gap);
    case BesovMethod::kernel:
      return besov_kernel(disc, f, theta, R);
    case BesovMethod::fixed_balls:
      return besov_fixed_balls(disc, f, theta, R, gap);
  }
  throw std::logic_error("unknown method");
}

NormReport jn_norm(const space::Discretization& disc, const Field& f,
                   double theta, double tau, double R, int restarts,
                   std::uint64_t seed) {
  validate(disc, f);
  if (f.domain != FieldDomain::boundary)
    throw std::invalid_argument("oscillation norms live on boundary fields");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("smoothness must lie in [0, 1]");
  if (!(tau >= 1.0)) throw std::invalid_argument("dilation must be >= 1");
  if (!(R > 0.0)) throw std::invalid_argument("scale cap must be positive");
  if (restarts < 1) throw std::invalid_argument("need at least one restart");

  const auto& pts = disc.boundary_points;
  const auto& w = disc.h_weights;
  const std::size_t n = pts.size();
  const double gap = min_sample_gap(disc);

  NormReport rep;
  rep.kind = "jn";
  rep.method = "packing";
  rep.theta = theta;
  rep.tau = tau;
  rep.scale_cap = R;
  rep.l1_part = l1_norm(disc, f);

  geom::Rng rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  double best = -1.0;
  ScaleRow best_row;
  std::vector<int> centers;
  for (int m = 0; m <= 40; ++m) {
    const double r = std::ldexp(R / tau, -m);
    if (r < gap) break;
    for (int s = 0; s < restarts; ++s) {
      if (s > 0) rng.shuffle(order);
      // inflated balls must stay pairwise disjoint, so centers need to be
      // more than 2*tau*r apart
      centers.clear();
      for (int cand : order) {
        bool ok = true;
        for (int c : centers)
          if (geom::dist(pts[cand], pts[c]) <= 2.0 * tau * r) {
            ok = false;
            break;
          }
        if (ok) centers.push_back(cand);
      }
      geom::KahanSum total;
      int deg = 0;
      for (int c : centers) {
        double mass = 0.0, mean = 0.0;
        int hits = 0;
        for (std::size_t y = 0; y < n; ++y) {
          if (geom::dist(pts[c], pts[y]) > tau * r) continue;
          mass += w[y];
          mean += w[y] * f.values[y];
          ++hits;
        }
        if (hits < 2) {
          ++deg;
          continue;
        }
        mean /= mass;
        geom::KahanSum osc;
        for (std::size_t y = 0; y < n; ++y)
          if (geom::dist(pts[c], pts[y]) <= tau * r)
            osc.add(w[y] * std::abs(f.values[y] - mean));
        total.add(osc.value());
      }
      const double value = std::pow(r, -theta) * total.value();
      if (value > best) {
        best = value;
        best_row = {r, value, deg};
      }
    }
  }
  if (best < 0.0) best = 0.0;
  rep.seminorm = best;
  rep.value = rep.l1_part + best;
  rep.table.push_back(best_row);
  return rep;
}

std::string NormReport::csv_text() const {
  std::string out = "scale,contribution,degenerate_ball_count\n";
  char line[96];
  for (const auto& row : table) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%d\n", row.scale,
                  row.contribution, row.degenerate_balls);
    out += line;
  }
  return out;
}

std::string NormReport::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["method"] = method;
  j["theta"] = theta;
  j["tau"] = tau;
  j["R"] = scale_cap;
  j["value"] = value;
  j["l1"] = l1_part;
  j["seminorm"] = seminorm;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table)
    rows.push_back({{"scale", row.scale},
                    {"contribution", row.contribution},
                    {"degenerate_balls", row.degenerate_balls}});
  j["table"] = rows;
  return j.dump();
}

}  // namespace bvlab::norms
