// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "scid/channel.hpp"
#include "scid/gabor.hpp"
#include "scid/grid.hpp"

namespace scid {

// Lag-n*T second moments of the echo within one period:
// Pi[n, s] = sum_k conj(c[k+n]) c[k] P_h(n*T, s*dt - k*T), the raw statistic
// of the method. The lag index n = m*J + r is stored flat over [0, J*n_g)
// and split into (m, r) only inside the S transform; s in [0, n_t).
struct PiTable {
  Grid grid;
  std::vector<std::complex<double>> v;  // [n*n_t + s]

  std::size_t index(int n, int s) const { return static_cast<std::size_t>(n) * grid.n_t + s; }
};

// Exact evaluation from the channel statistics; k runs over the delay cells
// of the cover (P_h vanishes elsewhere), c indices mod J, lags mod the
// circular axis.
PiTable pi_from_acf(const TrueAcf& acf, const WeightSequence& w);

// Normalizer of the empirical estimator, calibrated so that E[pi_hat] equals
// pi_from_acf exactly in the discrete model: the echo product carries one
// factor dt*dg (point power of eta) and two factors dg (the Doppler sums of
// the two echo samples), of which one dg is absorbed into P_hj. Locked by a
// regression test.
double pi_hat_normalizer(const Grid& grid);

// pi_hat[n, s] = 1/(L * dt * dg^2) * sum_l conj(y_l[(s + n*n_t) mod N]) * y_l[s].
// The conjugate sits on the later sample (time s*dt + n*T), matching the
// definition of Pi_n; each realization is evaluated in the first period.
PiTable pi_hat(const EchoEnsemble& echoes);

// Doppler-side DFT of Pi over lags congruent to r mod J:
// S[r, s, q] = (1/B) * sum_{m=0}^{n_g-1} exp(2*pi*i*q*(m*J+r)/(J*n_g))
//                      * Pi[(m*J+r) mod J*n_g, s],  r = 1..J.
struct STable {
  Grid grid;
  std::vector<std::complex<double>> v;  // [((r-1)*n_t + s)*n_g + q]

  std::size_t index(int r, int s, int q) const {
    return (static_cast<std::size_t>(r - 1) * grid.n_t + s) * grid.n_g + q;
  }
};

STable s_transform(const PiTable& pi);

// Raw frame inversion: per fine-grid point, [C_j] = V * [S_r]. Complex-valued
// so estimator noise is preserved for bias/variance analysis.
struct ComplexPatches {
  Grid grid;
  Cover cover;
  std::vector<std::vector<std::complex<double>>> values;  // per cell, [s*n_g + q]
};

ComplexPatches reconstruct_raw(const STable& s, const FrameMatrices& fm, const Cover& cover);

enum class ReconstructMode {
  oracle,    // take real parts as-is; never clamp
  estimate,  // discard imaginary parts and clamp negatives to zero
};

struct Reconstruction {
  ScatteringFunction sf;
  ReconstructMode mode = ReconstructMode::oracle;
  double max_imag_residue = 0.0;   // max |Im| before discarding
  double max_abs_value = 0.0;      // max |value| of the raw patches
  long long clamped_negatives = 0; // estimate mode only
};

Reconstruction reconstruct(const STable& s, const FrameMatrices& fm, const Cover& cover,
                           ReconstructMode mode);

// true_acf -> pi_from_acf -> s_transform -> reconstruct(oracle); recovers the
// input scattering function to numerical precision.
Reconstruction identify_oracle(const ScatteringFunction& truth, const WeightSequence& w);

// pi_hat -> s_transform -> raw frame inversion; the unbiased estimator before
// any clamping.
ComplexPatches estimate_raw(const EchoEnsemble& echoes, const WeightSequence& w,
                            const Cover& cover);

// Same pipeline finished with estimate-mode clamping.
Reconstruction estimate(const EchoEnsemble& echoes, const WeightSequence& w, const Cover& cover);

// Exact covariance Cov(pi_hat[m1*J+r, s], pi_hat[m2*J+r, s]) under the proper
// Gaussian model, from the pairing expansion of the fourth moment of y. With
// A = s + (m1*J+r)*n_t and C = s + (m2*J+r)*n_t on the circular axis:
//   Cov = E[conj(y_A) y_C] * E[conj(y_s) y_s] / (L * (dt*dg^2)^2).
// The mixed pairing E[conj(y_A) y_s] E[y_C conj(y_s)] cancels against the
// product of means, and the pure pairing vanishes because E[eta*eta] = 0.
std::complex<double> pihat_covariance_exact(const ScatteringFunction& sf,
                                            const WeightSequence& w, int m1, int m2, int r,
                                            int s, long long L);

// max |a - b| over the assembled fine grid, divided by max |b| (absolute when
// b is identically zero).
double max_rel_error(const ScatteringFunction& a, const ScatteringFunction& b);

}  // namespace scid
