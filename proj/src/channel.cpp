// SPDX-License-Identifier: Apache-2.0
#include "scid/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "scid/rng.hpp"
#include "scid/util.hpp"

namespace scid {

namespace {

int mod(long long v, int m) {
  const long long r = v % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

// exp(2*pi*i*m/n) for m in [0, n)
std::vector<std::complex<double>> pos_roots(int n) {
  std::vector<std::complex<double>> w(n);
  for (int m = 0; m < n; ++m) {
    w[m] = std::polar(1.0, 2.0 * std::numbers::pi * m / n);
  }
  return w;
}

}  // namespace

SpreadingRealization sample_spreading(const ScatteringFunction& sf, std::uint64_t seed) {
  const Grid& g = sf.grid;
  Rng rng(seed);
  SpreadingRealization real;
  real.grid = g;
  real.cover = sf.cover;
  real.eta.resize(sf.values.size());
  const double dm = g.dt * g.dg;
  for (std::size_t j = 0; j < sf.values.size(); ++j) {
    real.eta[j].resize(sf.values[j].size());
    for (std::size_t i = 0; i < sf.values[j].size(); ++i) {
      const auto [g1, g2] = rng.normal_pair();
      const double amp = std::sqrt(sf.values[j][i] * dm / 2.0);
      real.eta[j][i] = std::complex<double>(amp * g1, amp * g2);
    }
  }
  return real;
}

Echo sound(const SpreadingRealization& real, const WeightSequence& w) {
  const Grid& g = real.grid;
  if (w.J != g.J) {
    throw std::invalid_argument("weight period " + std::to_string(w.J) +
                                " does not match grid J = " + std::to_string(g.J));
  }
  const int N = g.total_samples();
  const auto roots = pos_roots(N);

  Echo echo;
  echo.grid = g;
  echo.y.assign(N, {0.0, 0.0});
  for (int x = 0; x < N; ++x) {
    const int n = x / g.n_t;
    const int s = x % g.n_t;
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < real.eta.size(); ++j) {
      const Cell& cell = real.cover.cells[j];
      std::complex<double> cell_acc{0.0, 0.0};
      for (int q = 0; q < g.n_g; ++q) {
        const long long f = static_cast<long long>(cell.b) * g.n_g + q;
        cell_acc += real.eta[j][static_cast<std::size_t>(s) * g.n_g + q] * roots[mod(f * x, N)];
      }
      acc += w.c[mod(n - cell.a, g.J)] * cell_acc;
    }
    echo.y[x] = acc * g.dg;
  }
  return echo;
}

EchoEnsemble sound_ensemble(const ScatteringFunction& sf, const WeightSequence& w, int L,
                            std::uint64_t seed_base, int threads) {
  if (L < 1) throw std::invalid_argument("ensemble size L must be >= 1");
  EchoEnsemble ens;
  ens.grid = sf.grid;
  ens.y.resize(L);
  parallel_for(L, threads, [&](std::int64_t l) {
    ens.y[l] = sound(sample_spreading(sf, seed_base + static_cast<std::uint64_t>(l)), w).y;
  });
  return ens;
}

TrueAcf true_acf(const ScatteringFunction& sf) {
  const Grid& g = sf.grid;
  const int P = g.periods();
  const auto roots = pos_roots(P);  // conjugated below for the minus sign

  TrueAcf acf;
  acf.grid = g;
  acf.cover = sf.cover;
  acf.per_cell.assign(sf.values.size(),
                      std::vector<std::complex<double>>(static_cast<std::size_t>(P) * g.n_t));
  for (std::size_t j = 0; j < sf.values.size(); ++j) {
    for (int n = 0; n < P; ++n) {
      for (int s = 0; s < g.n_t; ++s) {
        std::complex<double> acc{0.0, 0.0};
        for (int q = 0; q < g.n_g; ++q) {
          acc += sf.values[j][sf.patch_index(s, q)] *
                 std::conj(roots[mod(static_cast<long long>(q) * n, P)]);
        }
        acf.per_cell[j][acf.cell_index(n, s)] = acc * g.dg;
      }
    }
  }

  const auto roots_j = pos_roots(g.J);
  acf.composite.assign(static_cast<std::size_t>(P) * g.delay_bins(), {0.0, 0.0});
  for (std::size_t j = 0; j < sf.values.size(); ++j) {
    const Cell& cell = sf.cover.cells[j];
    for (int n = 0; n < P; ++n) {
      const std::complex<double> phase =
          std::conj(roots_j[mod(static_cast<long long>(n) * cell.b, g.J)]);
      for (int s = 0; s < g.n_t; ++s) {
        acf.composite[acf.composite_index(n, cell.a * g.n_t + s)] +=
            phase * acf.per_cell[j][acf.cell_index(n, s)];
      }
    }
  }
  return acf;
}

std::complex<double> echo_cross_moment(const ScatteringFunction& sf, const WeightSequence& w,
                                       int x_conj, int x) {
  const Grid& g = sf.grid;
  if (w.J != g.J) throw std::invalid_argument("weight period does not match grid");
  const int N = g.total_samples();
  if (x_conj < 0 || x_conj >= N || x < 0 || x >= N) {
    throw std::invalid_argument("sample index out of range");
  }
  if (x_conj % g.n_t != x % g.n_t) return {0.0, 0.0};

  const auto roots = pos_roots(N);
  const int s = x % g.n_t;
  const int n0 = x / g.n_t;
  const int n1 = x_conj / g.n_t;
  const double point_power = g.dt * g.dg * g.dg * g.dg;  // E|eta|^2 * dg^2

  std::complex<double> acc{0.0, 0.0};
  for (std::size_t j = 0; j < sf.values.size(); ++j) {
    const Cell& cell = sf.cover.cells[j];
    const std::complex<double> cw =
        std::conj(w.c[mod(n1 - cell.a, g.J)]) * w.c[mod(n0 - cell.a, g.J)];
    std::complex<double> cell_acc{0.0, 0.0};
    for (int q = 0; q < g.n_g; ++q) {
      const long long f = static_cast<long long>(cell.b) * g.n_g + q;
      cell_acc += sf.values[j][sf.patch_index(s, q)] *
                  roots[mod(f * (static_cast<long long>(x) - x_conj), N)];
    }
    acc += cw * cell_acc;
  }
  return acc * point_power;
}

}  // namespace scid
