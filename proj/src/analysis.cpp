// SPDX-License-Identifier: Apache-2.0
#include "scid/analysis.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "scid/channel.hpp"
#include "scid/ident.hpp"
#include "scid/rng.hpp"
#include "scid/util.hpp"

namespace scid {

double variance_bound(const FrameMatrices& fm, const Grid& grid, long long L,
                      const ScatteringFunction& sf) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(fm.V);
  const double vnorm = svd.singularValues()(0);
  const double c2 = scattering_l2_squared(sf);
  const double J = grid.J;
  return 4.0 * vnorm * vnorm * J * J * c2 / (static_cast<double>(L) * grid.B * grid.B);
}

namespace {

// One batch of independent raw estimates; row t is trial t flattened over
// (j, s, q). Per-trial seeds are splitmix-derived, so any thread count gives
// the same rows.
std::vector<std::vector<std::complex<double>>> run_batch(const ScatteringFunction& truth,
                                                         const WeightSequence& w,
                                                         const Cover& cover, int L, int trials,
                                                         std::uint64_t seed, int threads) {
  std::vector<std::vector<std::complex<double>>> rows(trials);
  parallel_for(trials, threads, [&](std::int64_t t) {
    const EchoEnsemble ens =
        sound_ensemble(truth, w, L, mix_seed(seed, static_cast<std::uint64_t>(t)), 1);
    const ComplexPatches raw = estimate_raw(ens, w, cover);
    std::vector<std::complex<double>> flat;
    flat.reserve(raw.values.size() * raw.values[0].size());
    for (const auto& patch : raw.values) {
      flat.insert(flat.end(), patch.begin(), patch.end());
    }
    rows[t] = std::move(flat);
  });
  return rows;
}

double batch_cover_avg_variance(const std::vector<std::vector<std::complex<double>>>& rows) {
  const int trials = static_cast<int>(rows.size());
  const std::size_t points = rows[0].size();
  double total = 0.0;
  for (std::size_t p = 0; p < points; ++p) {
    KahanSum<std::complex<double>> mean_acc;
    for (const auto& row : rows) mean_acc.add(row[p]);
    const std::complex<double> mean = mean_acc.value() / static_cast<double>(trials);
    KahanSum<double> var_acc;
    for (const auto& row : rows) var_acc.add(std::norm(row[p] - mean));
    total += var_acc.value() / (trials - 1);
  }
  return total / static_cast<double>(points);
}

}  // namespace

MCReport monte_carlo(const ScatteringFunction& truth, const WeightSequence& w,
                     const Cover& cover, const MCConfig& cfg) {
  if (cfg.trials < 2) throw std::invalid_argument("trials must be >= 2");
  if (cfg.L < 1) throw std::invalid_argument("L must be >= 1");
  const Grid& g = truth.grid;
  const FrameMatrices fm = build_frame_matrices(w, cover);

  MCReport rep;
  rep.J = g.J;
  rep.T = g.T;
  rep.n_t = g.n_t;
  rep.n_g = g.n_g;
  rep.L = cfg.L;
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;
  rep.cond = fm.cond;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(fm.V);
  rep.spectral_norm_V = svd.singularValues()(0);
  rep.frobenius_norm_V = fm.V.norm();

  const auto rows = run_batch(truth, w, cover, cfg.L, cfg.trials, cfg.seed, cfg.threads);
  const std::size_t points = rows[0].size();

  std::vector<double> flat_truth;
  flat_truth.reserve(points);
  for (const auto& patch : truth.values) {
    flat_truth.insert(flat_truth.end(), patch.begin(), patch.end());
  }

  rep.bias.resize(points);
  rep.variance.resize(points);
  rep.se.resize(points);
  double var_total = 0.0;
  for (std::size_t p = 0; p < points; ++p) {
    KahanSum<std::complex<double>> mean_acc;
    for (const auto& row : rows) mean_acc.add(row[p]);
    const std::complex<double> mean = mean_acc.value() / static_cast<double>(cfg.trials);
    KahanSum<double> var_acc;
    for (const auto& row : rows) var_acc.add(std::norm(row[p] - mean));
    rep.variance[p] = var_acc.value() / (cfg.trials - 1);
    rep.bias[p] = mean.real() - flat_truth[p];
    rep.se[p] = std::sqrt(rep.variance[p] / cfg.trials);
    var_total += rep.variance[p];
  }
  rep.cover_avg_variance = var_total / static_cast<double>(points);
  rep.bound = variance_bound(fm, g, cfg.L, truth);
  rep.slack_ratio =
      rep.cover_avg_variance > 0.0 ? rep.bound / rep.cover_avg_variance : 0.0;
  rep.bound_pass = rep.cover_avg_variance <= rep.bound;

  rep.strict_pass_count = 0;
  for (const auto& row : rows) {
    double dev = 0.0;
    for (std::size_t p = 0; p < points; ++p) dev += std::norm(row[p] - flat_truth[p]);
    dev /= static_cast<double>(points);
    if (dev < rep.bound) ++rep.strict_pass_count;
  }

  rep.max_abs_bias_over_se = 0.0;
  rep.bias_pass = true;
  for (std::size_t p = 0; p < points; ++p) {
    const double abs_bias = std::abs(rep.bias[p]);
    if (rep.se[p] > 0.0) {
      rep.max_abs_bias_over_se = std::max(rep.max_abs_bias_over_se, abs_bias / rep.se[p]);
    }
    if (abs_bias > 5.0 * rep.se[p]) rep.bias_pass = false;
  }

  if (cfg.scaling_check) {
    rep.scaling_checked = true;
    const int st = std::max(cfg.scaling_trials, 2);
    const auto lo_rows =
        run_batch(truth, w, cover, cfg.L, st, cfg.seed ^ 0x5ca11ab1ed5eedULL, cfg.threads);
    const auto hi_rows = run_batch(truth, w, cover, cfg.L * cfg.scaling_factor, st,
                                   cfg.seed ^ 0x5ca12ab1ed5eedULL, cfg.threads);
    const double lo_var = batch_cover_avg_variance(lo_rows);
    const double hi_var = batch_cover_avg_variance(hi_rows);
    rep.var_ratio = hi_var > 0.0 ? lo_var / hi_var : 0.0;
    rep.scaling_pass = (hi_var == 0.0 && lo_var == 0.0) ||
                       (rep.var_ratio >= cfg.ratio_lo && rep.var_ratio <= cfg.ratio_hi);
  }
  return rep;
}

std::string format_mc_report(const MCReport& rep) {
  std::string out;
  char buf[256];
  const auto kv = [&](const char* key, const char* fmt, auto value) {
    std::snprintf(buf, sizeof(buf), fmt, value);
    out += key;
    out += '=';
    out += buf;
    out += '\n';
  };
  kv("J", "%d", rep.J);
  kv("T", "%.17g", rep.T);
  kv("n_t", "%d", rep.n_t);
  kv("n_g", "%d", rep.n_g);
  kv("L", "%d", rep.L);
  kv("trials", "%d", rep.trials);
  kv("seed", "%llu", static_cast<unsigned long long>(rep.seed));
  kv("cond_U", "%.17g", rep.cond);
  kv("spectral_norm_V", "%.17g", rep.spectral_norm_V);
  kv("frobenius_norm_V", "%.17g", rep.frobenius_norm_V);
  kv("cover_avg_variance", "%.17g", rep.cover_avg_variance);
  kv("variance_bound", "%.17g", rep.bound);
  kv("slack_ratio", "%.17g", rep.slack_ratio);
  kv("bound_pass", "%d", rep.bound_pass ? 1 : 0);
  kv("strict_pass_count", "%d", rep.strict_pass_count);
  kv("max_abs_bias_over_se", "%.17g", rep.max_abs_bias_over_se);
  kv("bias_pass", "%d", rep.bias_pass ? 1 : 0);
  if (rep.scaling_checked) {
    kv("var_ratio", "%.17g", rep.var_ratio);
    kv("scaling_pass", "%d", rep.scaling_pass ? 1 : 0);
  }
  out += "\nj,s,q,bias,variance\n";
  const std::size_t per_cell = static_cast<std::size_t>(rep.n_t) * rep.n_g;
  for (std::size_t p = 0; p < rep.bias.size(); ++p) {
    const std::size_t j = p / per_cell;
    const std::size_t s = (p % per_cell) / rep.n_g;
    const std::size_t q = p % rep.n_g;
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%.17g,%.17g\n", j, s, q, rep.bias[p],
                  rep.variance[p]);
    out += buf;
  }
  return out;
}

}  // namespace scid
