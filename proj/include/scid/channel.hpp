// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "scid/gabor.hpp"
#include "scid/grid.hpp"

namespace scid {

// One draw of the random spreading weights. eta[j][s*n_g + q] multiplies the
// time-frequency shift by delay (a_j*n_t + s)*dt and Doppler (b_j*n_g + q)*dg.
// Entries are independent proper Gaussians with E|eta|^2 = C * dt * dg (the
// Riemann discretization of the continuous double delta) and E[eta^2] = 0.
struct SpreadingRealization {
  Grid grid;
  Cover cover;
  std::vector<std::vector<std::complex<double>>> eta;
};

// eta = sqrt(C*dt*dg/2) * (g1 + i*g2), g1, g2 standard normal from the seeded
// stream. One normal pair is consumed for every fine-grid point, padding
// included, so the stream layout does not depend on which cells carry mass.
SpreadingRealization sample_spreading(const ScatteringFunction& sf, std::uint64_t seed);

// Received signal on the circular axis; y[x] is the sample at time x*dt.
struct Echo {
  Grid grid;
  std::vector<std::complex<double>> y;
};

// Sounds the realization with the J-periodic weighted delta train
// sum_k c[k mod J] delta(t - k*T), k = 0 .. J*n_g - 1 on the circular axis.
// For x = n*n_t + s:
//   y[x] = sum_j c[(n - a_j) mod J] * sum_q eta_j[s,q] * exp(2*pi*i*f*x/N) * dg
// with f = b_j*n_g + q and N the total sample count; the phase is an exact
// integer multiple of 2*pi/N, so the circular convolution is exact.
Echo sound(const SpreadingRealization& real, const WeightSequence& w);

// L echoes of independent channel draws under the same sounding signal.
// Realization l uses seed_base + l; results do not depend on thread count.
struct EchoEnsemble {
  Grid grid;
  std::vector<std::vector<std::complex<double>>> y;
  int L() const { return static_cast<int>(y.size()); }
};

EchoEnsemble sound_ensemble(const ScatteringFunction& sf, const WeightSequence& w, int L,
                            std::uint64_t seed_base, int threads = 1);

// Exact second-order statistics of the channel, on the lag grid {n*T}.
struct TrueAcf {
  Grid grid;
  Cover cover;
  // per_cell[j][n*n_t + s] = P_hj(n*T, s*dt)
  //    = sum_q exp(-2*pi*i*q*n/(J*n_g)) * C_j[s,q] * dg,   n in [0, J*n_g).
  std::vector<std::vector<std::complex<double>>> per_cell;
  // composite[n*(n_a*n_t) + a*n_t + s] = P_h(n*T, (a*n_t + s)*dt)
  //    = sum over cells with delay offset a of
  //      exp(-2*pi*i*n*b_j/J) * P_hj(n*T, s*dt).
  std::vector<std::complex<double>> composite;

  std::size_t cell_index(int n, int s) const {
    return static_cast<std::size_t>(n) * grid.n_t + s;
  }
  std::size_t composite_index(int n, int d) const {
    return static_cast<std::size_t>(n) * grid.delay_bins() + d;
  }
};

TrueAcf true_acf(const ScatteringFunction& sf);

// E[conj(y[x_conj]) * y[x]], assembled directly from E|eta|^2 = C*dt*dg.
// Vanishes unless x_conj and x agree modulo n_t (uncorrelated scatterers pin
// the two delays to the same fine sample).
std::complex<double> echo_cross_moment(const ScatteringFunction& sf, const WeightSequence& w,
                                       int x_conj, int x);

}  // namespace scid
