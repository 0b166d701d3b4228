#include "bvlab/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace bvlab::trace {

namespace {

using geom::KahanSum;

void append_g17(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

double oscillation(std::span<const double> values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

// Least-squares slope of log(residual) against log(radius).
double fit_slope(std::span<const double> radii,
                 std::span<const double> residuals) {
  std::vector<double> xs, ys;
  for (std::size_t m = 0; m < radii.size(); ++m)
    if (residuals[m] > 0.0) {
      xs.push_back(std::log(radii[m]));
      ys.push_back(std::log(residuals[m]));
    }
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double cov = 0.0, var = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cov += (xs[i] - mx) * (ys[i] - my);
    var += (xs[i] - mx) * (xs[i] - mx);
  }
  return var > 0.0 ? cov / var : 0.0;
}

// Nonincreasing over the finest (up to) three residuals, with slack for
// sample noise at the mesh scale.
bool tail_nonincreasing(std::span<const double> residuals) {
  const std::size_t n = residuals.size();
  const std::size_t first = n > 3 ? n - 3 : 0;
  for (std::size_t m = first; m + 1 < n; ++m)
    if (residuals[m + 1] > 1.25 * residuals[m] + 1e-15) return false;
  return true;
}

}  // namespace

std::vector<double> default_radii(const space::Discretization& disc) {
  std::vector<double> radii;
  for (double r = disc.diam / 10.0; r >= disc.mesh_h; r /= 2.0)
    radii.push_back(r);
  if (radii.empty()) radii.push_back(disc.diam / 10.0);
  return radii;
}

TraceEntry trace_at(const space::Discretization& disc, const norms::Field& u,
                    int z, std::span<const double> radii, int n_min,
                    double tol) {
  if (u.domain != norms::FieldDomain::interior ||
      u.values.size() != disc.interior_points.size())
    throw std::invalid_argument("shrinking-ball trace needs an interior field");
  if (z < 0 || z >= static_cast<int>(disc.boundary_points.size()))
    throw std::invalid_argument("boundary index out of range");
  if (radii.empty()) throw std::invalid_argument("empty radius ladder");
  for (std::size_t m = 0; m < radii.size(); ++m)
    if (radii[m] <= 0.0 || (m > 0 && radii[m] >= radii[m - 1]))
      throw std::invalid_argument("radii must be positive and decreasing");
  if (n_min < 1) throw std::invalid_argument("n_min must be positive");
  if (tol < 0.0)
    tol = std::max(0.05 * oscillation(u.values), 10.0 * disc.mesh_h);

  const geom::Vec2 center = disc.boundary_points[z];
  std::vector<double> dist(disc.interior_points.size());
  for (std::size_t i = 0; i < dist.size(); ++i)
    dist[i] = geom::dist(disc.interior_points[i], center);

  TraceEntry entry;
  entry.z_id = z;
  // Balls are nested, so the admissible radii form a prefix of the ladder.
  std::vector<std::vector<int>> members;
  for (double r : radii) {
    std::vector<int> inside;
    for (std::size_t i = 0; i < dist.size(); ++i)
      if (dist[i] < r) inside.push_back(static_cast<int>(i));
    if (static_cast<int>(inside.size()) < n_min) break;
    entry.radii.push_back(r);
    members.push_back(std::move(inside));
  }
  if (entry.radii.empty()) return entry;
  entry.resolvable = true;

  KahanSum num, den;
  for (int i : members.back()) {
    num.add(disc.mu_weights[i] * u.values[i]);
    den.add(disc.mu_weights[i]);
  }
  entry.Tu = num.value() / den.value();

  for (const auto& inside : members) {
    KahanSum dev, mass;
    for (int i : inside) {
      dev.add(disc.mu_weights[i] * std::abs(u.values[i] - entry.Tu));
      mass.add(disc.mu_weights[i]);
    }
    entry.residuals.push_back(dev.value() / mass.value());
  }
  entry.slope = fit_slope(entry.radii, entry.residuals);
  entry.converged =
      entry.residuals.back() <= tol && tail_nonincreasing(entry.residuals);
  return entry;
}

TraceReport trace_identity_report(const space::Discretization& disc,
                                  const norms::Field& f,
                                  const ext::ExtensionResult& result,
                                  int sample_size,
                                  std::span<const double> radii,
                                  std::uint64_t seed, int n_min) {
  if (f.domain != norms::FieldDomain::boundary ||
      f.values.size() != disc.boundary_points.size())
    throw std::invalid_argument("reference data must live on the boundary");
  if (result.F.values.size() != disc.interior_points.size())
    throw std::invalid_argument("extension does not match the domain");
  if (sample_size < 1) throw std::invalid_argument("empty boundary sample");

  std::vector<double> ladder;
  if (radii.empty()) {
    ladder = default_radii(disc);
    radii = ladder;
  }
  const double osc_f = oscillation(f.values);
  const double tol = std::max(0.05 * osc_f, 10.0 * disc.mesh_h);

  const int n = static_cast<int>(disc.boundary_points.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (sample_size < n) {
    geom::Rng rng(seed);
    rng.shuffle(order);
    order.resize(sample_size);
  }
  std::sort(order.begin(), order.end());

  TraceReport report;
  int resolvable = 0, converged = 0;
  KahanSum error_sum;
  for (int z : order) {
    TraceEntry entry = trace_at(disc, result.F, z, radii, n_min, tol);
    if (entry.resolvable) {
      const double r_fine = entry.radii.back();
      report.r_min = std::max(report.r_min, r_fine);
      const double error = std::abs(entry.Tu - f.values[z]);

      // Local boundary oscillation: flags jump neighborhoods and bounds the
      // recovery error.  A trace ball of radius r sees field values built
      // from boundary data within a few multiples of r (the shadows of the
      // covering balls inside it reach about 8r), so the jump window is a
      // small multiple of the finest radius.
      KahanSum osc_num, osc_den;
      for (int w = 0; w < n; ++w) {
        const double gap =
            geom::dist(disc.boundary_points[w], disc.boundary_points[z]);
        if (gap < 128.0 * r_fine) {
          osc_num.add(disc.h_weights[w] *
                      std::abs(f.values[w] - f.values[z]));
          osc_den.add(disc.h_weights[w]);
        }
        if (osc_f > 0.0 && gap < 5.0 * r_fine &&
            std::abs(f.values[w] - f.values[z]) > 0.5 * osc_f)
          entry.jump_neighbor = true;
      }
      const double osc_bound = osc_num.value() / osc_den.value();
      report.osc_constant =
          std::max(report.osc_constant, error / (osc_bound + disc.mesh_h));

      report.errors.push_back(error);
      report.max_error = std::max(report.max_error, error);
      error_sum.add(error);
      ++resolvable;
      if (entry.converged) ++converged;
    } else {
      report.errors.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    report.entries.push_back(std::move(entry));
  }
  if (resolvable > 0) {
    report.mean_error = error_sum.value() / resolvable;
    report.fraction_converged = static_cast<double>(converged) / resolvable;
  }
  return report;
}

std::string TraceReport::csv_text() const {
  std::string out = "z_id,Tu,final_residual,slope,converged,is_jump_neighbor\n";
  for (const auto& e : entries) {
    out += std::to_string(e.z_id);
    out += ',';
    append_g17(out, e.Tu);
    out += ',';
    append_g17(out, e.resolvable ? e.residuals.back()
                                 : std::numeric_limits<double>::quiet_NaN());
    out += ',';
    append_g17(out, e.slope);
    out += ',';
    out += e.converged ? '1' : '0';
    out += ',';
    out += e.jump_neighbor ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string TraceReport::to_json() const {
  nlohmann::ordered_json j;
  j["r_min"] = r_min;
  j["max_error"] = max_error;
  j["mean_error"] = mean_error;
  j["fraction_converged"] = fraction_converged;
  j["osc_constant"] = osc_constant;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json row;
    row["z_id"] = e.z_id;
    row["Tu"] = e.Tu;
    row["final_residual"] =
        e.resolvable ? e.residuals.back() : 0.0;
    row["slope"] = e.slope;
    row["converged"] = e.converged;
    row["jump_neighbor"] = e.jump_neighbor;
    j["entries"].push_back(std::move(row));
  }
  return j.dump(2);
}

}  // namespace bvlab::trace
