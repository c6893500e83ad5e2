// SPDX-License-Identifier: Apache-2.0
#include "scid/ident.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "scid/util.hpp"

namespace scid {

namespace {

int mod(long long v, int m) {
  const long long r = v % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

std::vector<std::complex<double>> pos_roots(int n) {
  std::vector<std::complex<double>> w(n);
  for (int m = 0; m < n; ++m) {
    w[m] = std::polar(1.0, 2.0 * std::numbers::pi * m / n);
  }
  return w;
}

}  // namespace

PiTable pi_from_acf(const TrueAcf& acf, const WeightSequence& w) {
  const Grid& g = acf.grid;
  if (w.J != g.J) throw std::invalid_argument("weight period does not match grid");
  const int P = g.periods();

  // Distinct delay offsets of the cover; the composite ACF vanishes at all
  // other delays, so these are the only k = -a with a nonzero term.
  std::vector<int> delays;
  for (const Cell& c : acf.cover.cells) {
    if (std::find(delays.begin(), delays.end(), c.a) == delays.end()) delays.push_back(c.a);
  }

  PiTable pi;
  pi.grid = g;
  pi.v.assign(static_cast<std::size_t>(P) * g.n_t, {0.0, 0.0});
  for (int n = 0; n < P; ++n) {
    for (int s = 0; s < g.n_t; ++s) {
      std::complex<double> acc{0.0, 0.0};
      for (int a : delays) {
        // k = -a: conj(c[k+n]) * c[k] * P_h(n*T, s*dt + a*T)
        acc += std::conj(w.c[mod(n - a, g.J)]) * w.c[mod(-a, g.J)] *
               acf.composite[acf.composite_index(n, a * g.n_t + s)];
      }
      pi.v[pi.index(n, s)] = acc;
    }
  }
  return pi;
}

double pi_hat_normalizer(const Grid& grid) { return grid.dt * grid.dg * grid.dg; }

PiTable pi_hat(const EchoEnsemble& echoes) {
  const Grid& g = echoes.grid;
  const int L = echoes.L();
  if (L < 1) throw std::invalid_argument("empty echo ensemble");
  const int N = g.total_samples();
  const int P = g.periods();
  const double norm = pi_hat_normalizer(g) * L;

  PiTable pi;
  pi.grid = g;
  pi.v.assign(static_cast<std::size_t>(P) * g.n_t, {0.0, 0.0});
  for (int n = 0; n < P; ++n) {
    for (int s = 0; s < g.n_t; ++s) {
      const int later = (s + n * g.n_t) % N;
      KahanSum<std::complex<double>> acc;
      for (int l = 0; l < L; ++l) {
        acc.add(std::conj(echoes.y[l][later]) * echoes.y[l][s]);
      }
      pi.v[pi.index(n, s)] = acc.value() / norm;
    }
  }
  return pi;
}

STable s_transform(const PiTable& pi) {
  const Grid& g = pi.grid;
  const int P = g.periods();
  const int N = g.total_samples();
  const auto roots = pos_roots(N);

  STable s;
  s.grid = g;
  s.v.assign(static_cast<std::size_t>(g.J) * g.n_t * g.n_g, {0.0, 0.0});
  for (int r = 1; r <= g.J; ++r) {
    for (int st = 0; st < g.n_t; ++st) {
      for (int q = 0; q < g.n_g; ++q) {
        std::complex<double> acc{0.0, 0.0};
        for (int m = 0; m < g.n_g; ++m) {
          const long long lag = static_cast<long long>(m) * g.J + r;
          // q*dg * T * lag = q*lag / (J*n_g) turns of phase
          acc += roots[mod(static_cast<long long>(q) * lag * g.n_t, N)] *
                 pi.v[pi.index(mod(lag, P), st)];
        }
        s.v[s.index(r, st, q)] = acc / g.B;
      }
    }
  }
  return s;
}

ComplexPatches reconstruct_raw(const STable& s, const FrameMatrices& fm, const Cover& cover) {
  const Grid& g = s.grid;
  if (fm.V.rows() != g.J || static_cast<int>(cover.cells.size()) != g.J) {
    throw std::invalid_argument("frame matrices / cover do not match the grid");
  }
  ComplexPatches out;
  out.grid = g;
  out.cover = cover;
  out.values.assign(g.J,
                    std::vector<std::complex<double>>(static_cast<std::size_t>(g.n_t) * g.n_g));
  Eigen::VectorXcd sv(g.J);
  for (int st = 0; st < g.n_t; ++st) {
    for (int q = 0; q < g.n_g; ++q) {
      for (int r = 1; r <= g.J; ++r) sv(r - 1) = s.v[s.index(r, st, q)];
      const Eigen::VectorXcd cv = fm.V * sv;
      for (int j = 0; j < g.J; ++j) {
        out.values[j][static_cast<std::size_t>(st) * g.n_g + q] = cv(j);
      }
    }
  }
  return out;
}

namespace {

Reconstruction finalize(const ComplexPatches& raw, ReconstructMode mode) {
  const Grid& g = raw.grid;
  Reconstruction rec;
  rec.mode = mode;
  std::vector<std::vector<double>> values(raw.values.size());
  for (std::size_t j = 0; j < raw.values.size(); ++j) {
    values[j].resize(raw.values[j].size());
    for (std::size_t i = 0; i < raw.values[j].size(); ++i) {
      const std::complex<double> z = raw.values[j][i];
      rec.max_imag_residue = std::max(rec.max_imag_residue, std::abs(z.imag()));
      rec.max_abs_value = std::max(rec.max_abs_value, std::abs(z));
      double v = z.real();
      if (mode == ReconstructMode::estimate && v < 0.0) {
        v = 0.0;
        ++rec.clamped_negatives;
      }
      values[j][i] = v;
    }
  }
  rec.sf = ScatteringFunction{g, raw.cover, std::move(values)};
  return rec;
}

}  // namespace

Reconstruction reconstruct(const STable& s, const FrameMatrices& fm, const Cover& cover,
                           ReconstructMode mode) {
  return finalize(reconstruct_raw(s, fm, cover), mode);
}

Reconstruction identify_oracle(const ScatteringFunction& truth, const WeightSequence& w) {
  const FrameMatrices fm = build_frame_matrices(w, truth.cover);
  const TrueAcf acf = true_acf(truth);
  const PiTable pi = pi_from_acf(acf, w);
  const STable s = s_transform(pi);
  return reconstruct(s, fm, truth.cover, ReconstructMode::oracle);
}

ComplexPatches estimate_raw(const EchoEnsemble& echoes, const WeightSequence& w,
                            const Cover& cover) {
  const FrameMatrices fm = build_frame_matrices(w, cover);
  const PiTable pi = pi_hat(echoes);
  const STable s = s_transform(pi);
  return reconstruct_raw(s, fm, cover);
}

Reconstruction estimate(const EchoEnsemble& echoes, const WeightSequence& w,
                        const Cover& cover) {
  return finalize(estimate_raw(echoes, w, cover), ReconstructMode::estimate);
}

std::complex<double> pihat_covariance_exact(const ScatteringFunction& sf,
                                            const WeightSequence& w, int m1, int m2, int r,
                                            int s, long long L) {
  const Grid& g = sf.grid;
  if (r < 1 || r > g.J) throw std::invalid_argument("r must lie in [1, J]");
  if (s < 0 || s >= g.n_t) throw std::invalid_argument("s must lie in [0, n_t)");
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  const int N = g.total_samples();
  const int n1 = mod(static_cast<long long>(m1) * g.J + r, g.periods());
  const int n2 = mod(static_cast<long long>(m2) * g.J + r, g.periods());
  const int xa = (s + n1 * g.n_t) % N;
  const int xc = (s + n2 * g.n_t) % N;
  const std::complex<double> r_ac = echo_cross_moment(sf, w, xa, xc);
  const std::complex<double> r_ss = echo_cross_moment(sf, w, s, s);
  const double norm = pi_hat_normalizer(g);
  return r_ac * r_ss / (norm * norm * static_cast<double>(L));
}

double max_rel_error(const ScatteringFunction& a, const ScatteringFunction& b) {
  const std::vector<double> da = assemble(a);
  const std::vector<double> db = assemble(b);
  if (da.size() != db.size()) throw std::invalid_argument("grids do not match");
  double max_diff = 0.0;
  double max_ref = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(da[i] - db[i]));
    max_ref = std::max(max_ref, std::abs(db[i]));
  }
  return max_ref > 0.0 ? max_diff / max_ref : max_diff;
}

}  // namespace scid
