// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scid/gabor.hpp"
#include "scid/grid.hpp"

namespace scid {

// Upper bound on the cover-averaged estimator variance:
//   4 * ||V||^2 * J^2 * ||C||_2^2 / (L * B^2),
// with ||V|| the spectral norm (the operator norm of V acting on the S
// vector; the Frobenius value is reported alongside) and
// ||C||_2^2 = sum C^2 * dt * dg.
double variance_bound(const FrameMatrices& fm, const Grid& grid, long long L,
                      const ScatteringFunction& sf);

struct MCConfig {
  int L = 1000;            // echoes per trial
  int trials = 50;         // independent estimates
  std::uint64_t seed = 0;  // master seed; per-trial streams are splitmix-derived
  int threads = 1;
  bool scaling_check = true;  // also estimate variance at scaling_factor * L
  int scaling_factor = 4;
  int scaling_trials = 200;   // trials for each side of the ratio
  double ratio_lo = 2.67;     // acceptance band for the variance ratio
  double ratio_hi = 6.0;
};

// Bias and variance of the raw (unclamped) estimator, point by point on the
// fine grid, plus the bound comparison. Flattened point index:
// j*(n_t*n_g) + s*n_g + q.
struct MCReport {
  int J = 0;
  double T = 0.0;
  int n_t = 0, n_g = 0;
  int L = 0, trials = 0;
  std::uint64_t seed = 0;
  double cond = 0.0;
  double spectral_norm_V = 0.0;
  double frobenius_norm_V = 0.0;

  std::vector<double> bias;      // Re(mean) - truth
  std::vector<double> variance;  // E|est - mean|^2 (complex variance, >= 0)
  std::vector<double> se;        // sqrt(variance / trials)

  double cover_avg_variance = 0.0;  // mean over the fine grid of the point variance
  double bound = 0.0;
  double slack_ratio = 0.0;      // bound / cover_avg_variance
  bool bound_pass = false;       // cover_avg_variance <= bound
  int strict_pass_count = 0;     // trials whose per-trial mean squared deviation < bound
  double max_abs_bias_over_se = 0.0;
  bool bias_pass = false;        // every |bias| <= 5 * se

  double var_ratio = 0.0;  // var(L) / var(scaling_factor * L), scaling batches
  bool scaling_pass = false;
  bool scaling_checked = false;
};

// trials estimates, each from a fresh L-echo ensemble; trial t draws from the
// stream seeded with mix_seed(seed, t). Order-independent for any thread
// count.
MCReport monte_carlo(const ScatteringFunction& truth, const WeightSequence& w,
                     const Cover& cover, const MCConfig& cfg);

// key=value lines followed by a CSV block "j,s,q,bias,variance".
std::string format_mc_report(const MCReport& rep);

}  // namespace scid
