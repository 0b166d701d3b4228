// Shrinking-ball boundary traces of interior fields.
//
// At a boundary sample z we average the field over B(z, r) ∩ Ω for a
// decreasing ladder of radii.  A radius is admissible when its ball holds
// enough interior samples; the trace value is the mean over the smallest
// admissible ball, and the residual sequence (mean absolute deviation from
// that value, per radius) is the convergence evidence.  A report runs the
// trace over a seeded sample of boundary points and compares against given
// boundary data.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "bvlab/extension.hpp"
#include "bvlab/norms.hpp"
#include "bvlab/space.hpp"

namespace bvlab::trace {

struct TraceEntry {
  int z_id = 0;
  double Tu = 0.0;                // mean over the smallest admissible ball
  std::vector<double> radii;      // admissible radii, decreasing
  std::vector<double> residuals;  // mean |u - Tu| per admissible ball
  double slope = 0.0;             // log-log decay rate of the residuals
  bool resolvable = false;        // some radius held enough samples
  bool converged = false;
  bool jump_neighbor = false;     // set by reports from reference data
};

// Dyadic ladder diam/10, diam/20, ... down to the mesh scale.
std::vector<double> default_radii(const space::Discretization& disc);

// Shrinking-ball trace of an interior field at boundary sample z.  Radii
// must be positive and strictly decreasing.  With tol < 0 the convergence
// tolerance defaults to max(0.05 * osc(u), 10 * mesh_h).
TraceEntry trace_at(const space::Discretization& disc, const norms::Field& u,
                    int z, std::span<const double> radii, int n_min = 20,
                    double tol = -1.0);

struct TraceReport {
  std::vector<TraceEntry> entries;  // sorted by z_id
  std::vector<double> errors;       // |Tu - f(z)| per entry
  double r_min = 0.0;               // coarsest of the entries' finest radii
  double max_error = 0.0;
  double mean_error = 0.0;
  double fraction_converged = 0.0;  // over resolvable entries
  double osc_constant = 0.0;  // max error / (boundary oscillation + mesh_h)

  std::string csv_text() const;
  std::string to_json() const;
};

// Traces an extension of f at `sample_size` seeded boundary points and
// compares the recovered values with f itself.  An empty radii span selects
// the default ladder.
TraceReport trace_identity_report(const space::Discretization& disc,
                                  const norms::Field& f,
                                  const ext::ExtensionResult& result,
                                  int sample_size,
                                  std::span<const double> radii = {},
                                  std::uint64_t seed = 1, int n_min = 20);

}  // namespace bvlab::trace
