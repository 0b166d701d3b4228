#include "bvlab/extension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace bvlab::ext {
namespace {

void expect_boundary(const space::Discretization& disc, const norms::Field& f) {
  if (f.domain != norms::FieldDomain::boundary ||
      f.values.size() != disc.boundary_points.size())
    throw std::invalid_argument("expected a boundary field of matching length");
}

double l1_gap(const space::Discretization& disc, const std::vector<double>& a,
              const std::vector<double>& b) {
  geom::KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i)
    s.add(disc.h_weights[i] * std::abs(a[i] - b[i]));
  return s.value();
}

// symmetrized inf-convolution with slope bound L: the average of the largest
// L-Lipschitz minorant and the smallest L-Lipschitz majorant of f
std::vector<double> lipschitz_envelope(const space::Discretization& disc,
                                       const std::vector<double>& f, double L) {
  const auto& pts = disc.boundary_points;
  const std::size_t n = pts.size();
  std::vector<double> out(n);
  for (std::size_t x = 0; x < n; ++x) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t y = 0; y < n; ++y) {
      const double d = L * geom::dist(pts[x], pts[y]);
      lo = std::min(lo, f[y] + d);
      hi = std::max(hi, f[y] - d);
    }
    out[x] = (lo + hi) / 2.0;
  }
  return out;
}

norms::Field zero_boundary(const space::Discretization& disc) {
  norms::Field f;
  f.domain = norms::FieldDomain::boundary;
  f.values.assign(disc.boundary_points.size(), 0.0);
  return f;
}

norms::Field ramp_cutoff(const space::Discretization& disc, double rho_k,
                         double rho_next) {
  norms::Field psi;
  psi.domain = norms::FieldDomain::interior;
  psi.values.resize(disc.interior_points.size());
  for (std::size_t i = 0; i < psi.values.size(); ++i) {
    const double t = (rho_k - disc.dist_to_boundary[i]) / (rho_k - rho_next);
    psi.values[i] = std::max(0.0, std::min(1.0, t));
  }
  return psi;
}

}  // namespace

ExtensionResult extend_besov(const space::Discretization& disc,
                             const cover::WhitneyCover& cov,
                             const cover::PartitionOfUnity& pou,
                             const norms::Field& f) {
  expect_boundary(disc, f);
  if (pou.support.size() != cov.balls.size())
    throw std::invalid_argument("cover and bump family do not match");

  ExtensionResult out;
  out.tag = "besov";
  out.coefficients.resize(cov.balls.size());
  out.F.domain = norms::FieldDomain::interior;
  out.F.values.assign(disc.interior_points.size(), 0.0);

  for (std::size_t b = 0; b < cov.balls.size(); ++b) {
    geom::KahanSum num, den;
    for (int z : cov.balls[b].shadow) {
      num.add(disc.h_weights[z] * f.values[z]);
      den.add(disc.h_weights[z]);
    }
    const double a = num.value() / den.value();
    out.coefficients[b] = a;
    for (const auto& [i, phi] : pou.support[b]) out.F.values[i] += a * phi;
  }

  const auto lip = norms::pointwise_lip(disc, out.F);
  out.lip.domain = norms::FieldDomain::interior;
  out.lip.values = lip.values;
  return out;
}

std::pair<double, double> layer_energy(const space::Discretization& disc,
                                       const ExtensionResult& result,
                                       double rho1, double rho2) {
  if (result.F.values.size() != disc.interior_points.size())
    throw std::invalid_argument("extension does not match the discretization");
  const auto mask = cover::layer_mask(disc, rho1, rho2);
  geom::KahanSum grad, mass;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    grad.add(result.lip.values[i] * disc.mu_weights[i]);
    mass.add(std::abs(result.F.values[i]) * disc.mu_weights[i]);
  }
  return {grad.value(), mass.value()};
}

LipApprox lipschitz_approximation(const space::Discretization& disc,
                                  const norms::Field& f,
                                  double target_l1_error) {
  expect_boundary(disc, f);
  if (target_l1_error < 0.0)
    throw std::invalid_argument("approximation target must be nonnegative");
  // climb the power-of-two slope ladder until the envelope is close enough;
  // once the slope bound dominates the data's own slope the envelope is f
  // itself, so the climb always ends
  for (int m = 0;; ++m) {
    const double L = std::ldexp(1.0, m);
    auto g = lipschitz_envelope(disc, f.values, L);
    const double err = l1_gap(disc, g, f.values);
    if (err <= target_l1_error) {
      LipApprox out;
      out.g.domain = norms::FieldDomain::boundary;
      out.g.values = std::move(g);
      out.lip = L;
      out.l1_error = err;
      return out;
    }
  }
}

LayerSchedule build_schedule(const space::Discretization& disc,
                             const norms::Field& f, int K_max) {
  expect_boundary(disc, f);
  if (K_max < 2) throw std::invalid_argument("schedule needs at least 2 stages");

  LayerSchedule sched;
  sched.l1_f = norms::l1_norm(disc, f);

  LayerStage first;
  first.values = zero_boundary(disc);
  first.l1_error = sched.l1_f;
  sched.stages.push_back(std::move(first));

  if (sched.l1_f == 0.0) {
    sched.stages[0].rho = disc.diam / 4.0;
    LayerStage second;
    second.values = zero_boundary(disc);
    second.rho = disc.diam / 8.0;
    sched.stages.push_back(std::move(second));
  } else {
    // stage k+1 approximates f within 2^-k of its norm; rho_k shrinks with
    // both the geometric cap and the next stage's slope
    double prev_rho = 0.0;
    for (int k = 1; static_cast<int>(sched.stages.size()) < K_max; ++k) {
      const auto next =
          lipschitz_approximation(disc, f, std::ldexp(sched.l1_f, -k));
      const double cap = k == 1 ? disc.diam / 4.0 : prev_rho / 2.0;
      const double rho = std::min(cap, std::ldexp(sched.l1_f, -k) / (1.0 + next.lip));
      if (k > 1 && prev_rho - rho < disc.mesh_h) break;  // layer below mesh scale
      sched.stages.back().rho = rho;
      sched.sched_sum += rho * next.lip;
      sched.stages.push_back({next.g, next.lip, next.l1_error, 0.0});
      prev_rho = rho;
      if (std::ldexp(sched.l1_f, 2 - static_cast<int>(sched.stages.size())) <
          1e-9 * sched.l1_f)
        break;  // remaining stages would be numerically identical to f
    }
    // the deepest stage keeps the halving rule
    sched.stages.back().rho = prev_rho / 2.0;
  }

  for (std::size_t k = 0; k + 1 < sched.stages.size(); ++k)
    sched.cutoffs.push_back(
        ramp_cutoff(disc, sched.stages[k].rho, sched.stages[k + 1].rho));
  sched.truncation_indicator =
      sched.stages.back().rho * sched.stages.back().l1_error;
  return sched;
}

ExtensionResult extend_l1(const space::Discretization& disc,
                          const norms::Field& f, int K_max) {
  auto sched = build_schedule(disc, f, K_max);
  const auto cov = cover::whitney_cover(disc);
  const auto pou = cover::partition_of_unity(disc, cov);

  ExtensionResult out;
  out.tag = "l1-layered";
  out.F.domain = norms::FieldDomain::interior;
  out.F.values.assign(disc.interior_points.size(), 0.0);

  // glue the stage extensions: F = sum_k psi_k * (E f_{k+1} - E f_k); the
  // first stage is zero, so deep layers fade to zero and the collar
  // {dist < rho_K} carries the last stage's extension in full
  std::vector<double> prev(disc.interior_points.size(), 0.0);
  for (std::size_t k = 0; k + 1 < sched.stages.size(); ++k) {
    const auto stage = extend_besov(disc, cov, pou, sched.stages[k + 1].values);
    const auto& psi = sched.cutoffs[k].values;
    for (std::size_t i = 0; i < out.F.values.size(); ++i)
      out.F.values[i] += psi[i] * (stage.F.values[i] - prev[i]);
    prev = stage.F.values;
  }

  const auto lip = norms::pointwise_lip(disc, out.F);
  out.lip.domain = norms::FieldDomain::interior;
  out.lip.values = lip.values;
  out.schedule = std::move(sched);
  return out;
}

std::string LayerSchedule::to_json() const {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < stages.size(); ++k)
    rows.push_back({{"k", k + 1},
                    {"rho_k", stages[k].rho},
                    {"lip_fk", stages[k].lip},
                    {"l1_err_k", stages[k].l1_error}});
  nlohmann::ordered_json j;
  j["l1_f"] = l1_f;
  j["sched_sum"] = sched_sum;
  j["truncation_indicator"] = truncation_indicator;
  j["stages"] = rows;
  return j.dump();
}

std::string ExtensionResult::csv_text(const space::Discretization& disc) const {
  if (F.values.size() != disc.interior_points.size())
    throw std::invalid_argument("extension does not match the discretization");
  std::string out = "x,y,F,LipF\n";
  char line[128];
  for (std::size_t i = 0; i < F.values.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n",
                  disc.interior_points[i].x, disc.interior_points[i].y,
                  F.values[i], lip.values[i]);
    out += line;
  }
  return out;
}

}  // namespace bvlab::ext
