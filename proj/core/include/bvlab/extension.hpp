#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bvlab/cover.hpp"
#include "bvlab/norms.hpp"
#include "bvlab/space.hpp"

namespace bvlab::ext {

// One stage of the layered boundary approximation.
struct LayerStage {
  norms::Field values;    // Lipschitz stage on the boundary samples
  double lip = 0.0;       // certified Lipschitz bound of the stage
  double l1_error = 0.0;  // weighted l1 distance from the boundary data
  double rho = 0.0;       // layer radius attached to this stage
};

// Decreasing layer radii with Lipschitz stages and ramp cutoffs; stage 1 is
// identically zero, cutoffs[k-1] ramps from 1 inside {dist <= rho_{k+1}} to 0
// outside {dist < rho_k}.
struct LayerSchedule {
  std::vector<LayerStage> stages;     // k = 1..K
  std::vector<norms::Field> cutoffs;  // psi_k for k = 1..K-1, on the interior
  double l1_f = 0.0;                  // reference boundary norm
  double sched_sum = 0.0;             // sum of rho_k * lip(stage k+1)
  double truncation_indicator = 0.0;  // rho_K times the last stage's l1 error
  int depth() const { return static_cast<int>(stages.size()); }

  std::string to_json() const;  // [{k, rho_k, lip_fk, l1_err_k}, ...]
};

// A boundary-to-interior extension together with its slope field.
struct ExtensionResult {
  norms::Field F;                    // interior values
  norms::Field lip;                  // pointwise slope of F
  std::vector<double> coefficients;  // per-ball shadow averages (averaging tag)
  std::string tag;                   // "besov" or "l1-layered"
  LayerSchedule schedule;            // filled for the layered tag

  std::string csv_text(const space::Discretization& disc) const;  // x,y,F,LipF
};

// Linear extension by shadow averages: F = sum of (mean of f over the ball's
// boundary shadow) times the ball's bump.  Exactly linear in f and range
// preserving.
ExtensionResult extend_besov(const space::Discretization& disc,
                             const cover::WhitneyCover& cov,
                             const cover::PartitionOfUnity& pou,
                             const norms::Field& f);

// (slope mass, absolute mass) of the extension over the collar
// {rho1 <= dist < rho2}.
std::pair<double, double> layer_energy(const space::Discretization& disc,
                                       const ExtensionResult& result,
                                       double rho1, double rho2);

// Smallest power-of-two slope bound whose symmetrized inf-convolution meets
// the l1 target; returns that approximation.  g equals f whenever the ladder
// floor L = 1 already dominates the slope of f.
struct LipApprox {
  norms::Field g;
  double lip = 0.0;       // the chosen slope bound
  double l1_error = 0.0;  // achieved weighted l1 distance
};
LipApprox lipschitz_approximation(const space::Discretization& disc,
                                  const norms::Field& f,
                                  double target_l1_error);

// Stage ladder for the layered extension: stage k+1 approximates f within
// 2^-k of its norm, and rho_k = min(rho_{k-1}/2, 2^-k norm / (1 + lip)).
LayerSchedule build_schedule(const space::Discretization& disc,
                             const norms::Field& f, int K_max = 20);

// Nonlinear layered extension: glue the stage extensions with the ramp
// cutoffs, F = sum over k of psi_k * (E f_{k+1} - E f_k).  Deep inside the
// domain F fades to zero; on {dist < rho_K} it equals the last stage's
// extension.
ExtensionResult extend_l1(const space::Discretization& disc,
                          const norms::Field& f, int K_max = 20);

}  // namespace bvlab::ext
