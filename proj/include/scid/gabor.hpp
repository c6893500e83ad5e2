// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "scid/grid.hpp"

namespace scid {

// J-periodic unimodular weight sequence of the sounding train.
struct WeightSequence {
  int J = 0;
  std::vector<std::complex<double>> c;  // |c[k]| = 1, indexed mod J
};

// c[k] = exp(2*pi*i*u_k), u_k i.i.d. uniform on [0,1) from the seeded
// mt19937_64 stream. Same seed, bit-identical sequence.
WeightSequence random_weights(int J, std::uint64_t seed);

// Validating constructor for explicit or reloaded sequences.
WeightSequence make_weights(std::vector<std::complex<double>> c);

// Finite Weyl-Heisenberg vector: component i (0-based, corresponding to
// r = i+1) is exp(-2*pi*i*r*l/J) * c[(r-k) mod J]. k and l are reduced mod J.
Eigen::VectorXcd gabor_vector(const WeightSequence& w, int k, int l);

// U's column j is the Gabor vector at (a_j, b_j). D is diagonal with
// D_jj = c[(-a_j) mod J]. The patch mixing identity reads
//   S_r = sum_j exp(-2*pi*i*r*b_j/J) * conj(c[r-a_j]) * c[-a_j] * C_j,
// i.e. [S_r] = M [C_j] where M's column j is the Gabor vector of the
// conjugated window at (a_j, b_j), scaled by D_jj. Only the window weights
// are conjugated; the modulation phase keeps its sign. V is the inverse of M
// and cond is M's condition number (D is unitary, so D contributes nothing).
struct FrameMatrices {
  Eigen::MatrixXcd U;
  Eigen::VectorXcd D;  // diagonal entries
  Eigen::MatrixXcd V;
  double cond = 0.0;
};

// The patch-mixing matrix M described above.
Eigen::MatrixXcd analysis_matrix(const WeightSequence& w, const Cover& cover);

// Throws FrameConditionError if cond > 1e10 (a near-failure of the Haar
// property for this draw; reseed the weights), or if two cover cells coincide
// modulo J (no weights can separate those).
FrameMatrices build_frame_matrices(const WeightSequence& w, const Cover& cover);

struct HaarReport {
  long long total_subsets = 0;  // C(J^2, J)
  long long tested = 0;
  bool exhaustive = false;
  double min_abs_det = 0.0;
  long long failures = 0;  // subsets with |det| <= threshold
  double threshold = 1e-12;
  bool pass = false;
};

// Tests J-element subsets of the J^2 Gabor vectors for linear independence.
// Exhaustive when C(J^2, J) <= exhaustive_limit, otherwise 1000 random
// subsets from a fixed-seed stream.
HaarReport haar_check(const WeightSequence& w, long long exhaustive_limit);

}  // namespace scid
