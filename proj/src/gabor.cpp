// SPDX-License-Identifier: Apache-2.0
#include "scid/gabor.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "scid/errors.hpp"
#include "scid/rng.hpp"

namespace scid {

namespace {

constexpr double kCondLimit = 1e10;

int mod(long long v, int m) {
  const long long r = v % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

// exp(-2*pi*i*m/J) for m in [0, J)
std::vector<std::complex<double>> neg_roots(int J) {
  std::vector<std::complex<double>> w(J);
  for (int m = 0; m < J; ++m) {
    w[m] = std::polar(1.0, -2.0 * std::numbers::pi * m / J);
  }
  return w;
}

// C(n, k) clamped to cap; exact integer arithmetic while it fits.
long long choose_capped(int n, int k, long long cap) {
  long long c = 1;
  for (int i = 1; i <= k; ++i) {
    if (c > cap / (n - k + i)) return cap;
    c = c * (n - k + i) / i;
  }
  return std::min(c, cap);
}

double cond_from_svd(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

}  // namespace

WeightSequence random_weights(int J, std::uint64_t seed) {
  if (J < 1) throw std::invalid_argument("J must be >= 1");
  Rng rng(seed);
  WeightSequence w;
  w.J = J;
  w.c.resize(J);
  for (int k = 0; k < J; ++k) {
    w.c[k] = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform01());
  }
  return w;
}

WeightSequence make_weights(std::vector<std::complex<double>> c) {
  if (c.empty()) throw std::invalid_argument("weight sequence must not be empty");
  for (const auto& z : c) {
    if (std::abs(std::abs(z) - 1.0) > 1e-9) {
      throw std::invalid_argument("weight sequence must be unimodular");
    }
  }
  WeightSequence w;
  w.J = static_cast<int>(c.size());
  w.c = std::move(c);
  return w;
}

Eigen::VectorXcd gabor_vector(const WeightSequence& w, int k, int l) {
  const int J = w.J;
  const auto roots = neg_roots(J);
  Eigen::VectorXcd v(J);
  for (int i = 0; i < J; ++i) {
    const int r = i + 1;
    v(i) = roots[mod(static_cast<long long>(r) * l, J)] * w.c[mod(r - k, J)];
  }
  return v;
}

Eigen::MatrixXcd analysis_matrix(const WeightSequence& w, const Cover& cover) {
  const int J = w.J;
  WeightSequence conj_window;
  conj_window.J = J;
  conj_window.c.resize(J);
  for (int k = 0; k < J; ++k) conj_window.c[k] = std::conj(w.c[k]);

  Eigen::MatrixXcd m(J, J);
  for (int j = 0; j < J; ++j) {
    m.col(j) = gabor_vector(conj_window, cover.cells[j].a, cover.cells[j].b) *
               w.c[mod(-cover.cells[j].a, J)];
  }
  return m;
}

FrameMatrices build_frame_matrices(const WeightSequence& w, const Cover& cover) {
  const int J = w.J;
  if (static_cast<int>(cover.cells.size()) != J) {
    throw std::invalid_argument("cover has " + std::to_string(cover.cells.size()) +
                                " cells, weight sequence has period " + std::to_string(J));
  }
  for (int i = 0; i < J; ++i) {
    for (int j = i + 1; j < J; ++j) {
      if (mod(cover.cells[i].a, J) == mod(cover.cells[j].a, J) &&
          mod(cover.cells[i].b, J) == mod(cover.cells[j].b, J)) {
        throw FrameConditionError(
            "cover cells " + std::to_string(i) + " and " + std::to_string(j) +
            " coincide modulo J; no weight sequence can separate them");
      }
    }
  }

  FrameMatrices fm;
  fm.U.resize(J, J);
  fm.D.resize(J);
  for (int j = 0; j < J; ++j) {
    fm.U.col(j) = gabor_vector(w, cover.cells[j].a, cover.cells[j].b);
    fm.D(j) = w.c[mod(-cover.cells[j].a, J)];
  }

  const Eigen::MatrixXcd m = analysis_matrix(w, cover);
  fm.cond = cond_from_svd(m);
  if (!(fm.cond < kCondLimit)) {
    throw FrameConditionError("ill-conditioned frame submatrix (cond = " +
                              std::to_string(fm.cond) + "); reseed weights");
  }
  fm.V = m.partialPivLu().inverse();
  return fm;
}

HaarReport haar_check(const WeightSequence& w, long long exhaustive_limit) {
  const int J = w.J;
  const int n_vec = J * J;

  std::vector<Eigen::VectorXcd> vecs;
  vecs.reserve(n_vec);
  for (int k = 0; k < J; ++k) {
    for (int l = 0; l < J; ++l) {
      vecs.push_back(gabor_vector(w, k, l));
    }
  }

  HaarReport rep;
  rep.total_subsets = choose_capped(n_vec, J, std::numeric_limits<long long>::max() / 2);
  rep.exhaustive = rep.total_subsets <= exhaustive_limit;
  rep.min_abs_det = std::numeric_limits<double>::infinity();

  Eigen::MatrixXcd m(J, J);
  const auto test_subset = [&](const std::vector<int>& idx) {
    for (int j = 0; j < J; ++j) m.col(j) = vecs[idx[j]];
    const double d = std::abs(m.partialPivLu().determinant());
    rep.min_abs_det = std::min(rep.min_abs_det, d);
    if (d <= rep.threshold) ++rep.failures;
    ++rep.tested;
  };

  if (rep.exhaustive) {
    std::vector<int> idx(J);
    for (int j = 0; j < J; ++j) idx[j] = j;
    while (true) {
      test_subset(idx);
      int pos = J - 1;
      while (pos >= 0 && idx[pos] == n_vec - J + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int j = pos + 1; j < J; ++j) idx[j] = idx[j - 1] + 1;
    }
  } else {
    Rng rng(0x5eedULL);  // fixed stream: reports are reproducible
    std::vector<int> all(n_vec);
    for (int i = 0; i < n_vec; ++i) all[i] = i;
    std::vector<int> idx(J);
    for (int t = 0; t < 1000; ++t) {
      for (int j = 0; j < J; ++j) {  // partial Fisher-Yates
        const int pick = j + static_cast<int>(rng.next_u64() % (n_vec - j));
        std::swap(all[j], all[pick]);
        idx[j] = all[j];
      }
      test_subset(idx);
    }
  }
  rep.pass = rep.failures == 0;
  return rep;
}

}  // namespace scid
