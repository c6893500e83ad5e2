// SPDX-License-Identifier: Apache-2.0
//
// Shared test utilities. oracle_cross_moment / oracle_pi re-derive the echo
// second moments straight from the per-point channel statistics, on purpose
// through a different numerical route (floating-point phases instead of the
// library's integer root tables), so they can serve as an independent check
// of the true_acf -> pi_from_acf path.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "scid/channel.hpp"
#include "scid/errors.hpp"
#include "scid/gabor.hpp"
#include "scid/grid.hpp"
#include "scid/rng.hpp"

namespace scid_test {

inline int imod(long long v, int m) {
  const long long r = v % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

// E[conj(y[x_conj]) * y[x]] by direct summation of E|eta|^2 contributions.
inline std::complex<double> oracle_cross_moment(const scid::ScatteringFunction& sf,
                                                const scid::WeightSequence& w, int x_conj,
                                                int x) {
  const scid::Grid& g = sf.grid;
  const int N = g.total_samples();
  if (x % g.n_t != x_conj % g.n_t) return {0.0, 0.0};
  const int s = x % g.n_t;
  const int n0 = x / g.n_t;
  const int n1 = x_conj / g.n_t;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t j = 0; j < sf.values.size(); ++j) {
    const scid::Cell& cell = sf.cover.cells[j];
    const std::complex<double> cw =
        std::conj(w.c[imod(n1 - cell.a, g.J)]) * w.c[imod(n0 - cell.a, g.J)];
    for (int q = 0; q < g.n_g; ++q) {
      const double f = static_cast<double>(cell.b) * g.n_g + q;
      const double phase = 2.0 * std::numbers::pi * f * (x - x_conj) / N;
      acc += cw * sf.values[j][sf.patch_index(s, q)] * std::polar(1.0, phase);
    }
  }
  return acc * (g.dt * g.dg * g.dg * g.dg);
}

// Pi derived from the echo statistics: Pi_n(s*dt) * dt * dg^2 equals the
// second moment with the conjugate on the later sample s + n*n_t.
inline std::complex<double> oracle_pi(const scid::ScatteringFunction& sf,
                                      const scid::WeightSequence& w, int n, int s) {
  const scid::Grid& g = sf.grid;
  const int N = g.total_samples();
  const int later = (s + n * g.n_t) % N;
  return oracle_cross_moment(sf, w, later, s) / (g.dt * g.dg * g.dg);
}

// Random occupied cells inside the bounding box, completed to a J-cell cover
// by build_cover. Retries until all J resulting cells (padding included) are
// distinct modulo J, so the frame submatrix can be nonsingular; for boxes with
// n_a, n_b <= J that holds on the first try.
inline scid::Cover random_cover(const scid::Grid& g, int occupied, scid::Rng& rng) {
  std::vector<scid::Cell> box;
  for (int a = 0; a < g.n_a; ++a) {
    for (int b = 0; b < g.n_b; ++b) box.push_back({a, b});
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (std::size_t i = 0; i + 1 < box.size(); ++i) {
      const std::size_t pick = i + rng.next_u64() % (box.size() - i);
      std::swap(box[i], box[pick]);
    }
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(g.n_a) * g.n_b, 0);
    for (int i = 0; i < occupied; ++i) {
      mask[static_cast<std::size_t>(box[i].a) * g.n_b + box[i].b] = 1;
    }
    scid::Cover cover = scid::build_cover(g, mask);
    bool ok = true;
    for (int i = 0; i < g.J && ok; ++i) {
      for (int j = i + 1; j < g.J && ok; ++j) {
        if (imod(cover.cells[i].a, g.J) == imod(cover.cells[j].a, g.J) &&
            imod(cover.cells[i].b, g.J) == imod(cover.cells[j].b, g.J)) {
          ok = false;
        }
      }
    }
    if (ok) return cover;
  }
  throw std::runtime_error("no residue-distinct cover found for this box");
}

inline scid::ScatteringFunction random_scattering(const scid::Grid& g, const scid::Cover& cover,
                                                  scid::Rng& rng) {
  const std::size_t patch = static_cast<std::size_t>(g.n_t) * g.n_g;
  std::vector<std::vector<double>> values(cover.cells.size(), std::vector<double>(patch, 0.0));
  for (int j = 0; j < cover.occupied_count; ++j) {
    for (auto& v : values[j]) v = rng.uniform01();
  }
  return scid::make_scattering(g, cover, std::move(values));
}

// Draw weights until the frame condition number stays below cond_cap.
inline scid::WeightSequence weights_below_cond(int J, const scid::Cover& cover, double cond_cap,
                                               std::uint64_t seed0, scid::FrameMatrices* fm_out) {
  for (int t = 0; t < 100; ++t) {
    const scid::WeightSequence w = scid::random_weights(J, seed0 + t);
    try {
      scid::FrameMatrices fm = scid::build_frame_matrices(w, cover);
      if (fm.cond < cond_cap) {
        if (fm_out) *fm_out = std::move(fm);
        return w;
      }
    } catch (const scid::FrameConditionError&) {
    }
  }
  throw std::runtime_error("no well-conditioned weight draw found");
}

}  // namespace scid_test
