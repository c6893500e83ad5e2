// SPDX-License-Identifier: Apache-2.0
//
// scid - delay-Doppler channel simulation and scattering function recovery.
//
// Subcommands:
//   gen       build grid, cover, weights and a synthetic scattering function
//   sound     produce an ensemble of delta-train echoes
//   identify  recover the scattering function (oracle statistics or estimate)
//   analyze   Monte Carlo bias/variance report against the variance bound
//
// Every option can also be supplied through --config FILE as flat key=value
// lines; explicit command-line flags override the file. All randomness flows
// from the single --seed value. Exit codes: 0 success, 2 usage or input
// error, 3 numerical failure (ill-conditioned frame).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scid/analysis.hpp"
#include "scid/channel.hpp"
#include "scid/errors.hpp"
#include "scid/gabor.hpp"
#include "scid/grid.hpp"
#include "scid/ident.hpp"
#include "scid/io.hpp"
#include "scid/rng.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// Stream indices carved out of the master seed (splitmix-derived).
constexpr std::uint64_t kSeedWeights = 1;
constexpr std::uint64_t kSeedScattering = 2;
constexpr std::uint64_t kSeedSounding = 3;
constexpr std::uint64_t kSeedAnalyze = 4;

struct KeyValues {
  std::map<std::string, std::string> kv;

  template <typename T>
  T resolve(const std::optional<T>& flag, const std::string& key, const T& fallback) const {
    if (flag) return *flag;
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if constexpr (std::is_same_v<T, std::string>) {
      return it->second;
    } else if constexpr (std::is_same_v<T, double>) {
      return scid::parse_double(key, it->second);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      return scid::parse_u64(key, it->second);
    } else {
      return static_cast<T>(scid::parse_int(key, it->second));
    }
  }

  template <typename T>
  T require(const std::optional<T>& flag, const std::string& key) const {
    if (!flag && kv.find(key) == kv.end()) {
      throw std::runtime_error("missing required option '--" + key + "' (or config key '" +
                               key + "')");
    }
    return resolve(flag, key, T{});
  }

  bool has(const std::optional<std::string>& flag, const std::string& key) const {
    return flag.has_value() || kv.count(key) > 0;
  }
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}

std::vector<std::uint8_t> mask_from_cells(const scid::Grid& grid, const std::string& cells) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(grid.n_a) * grid.n_b, 0);
  std::size_t start = 0;
  while (start < cells.size()) {
    std::size_t end = cells.find(',', start);
    if (end == std::string::npos) end = cells.size();
    const std::string item = cells.substr(start, end - start);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::runtime_error("cells list items must look like a:b, got '" + item + "'");
    }
    const int a = static_cast<int>(scid::parse_int("cells", item.substr(0, colon)));
    const int b = static_cast<int>(scid::parse_int("cells", item.substr(colon + 1)));
    if (a < 0 || a >= grid.n_a || b < 0 || b >= grid.n_b) {
      throw std::runtime_error("cell " + item + " lies outside the bounding region");
    }
    mask[static_cast<std::size_t>(a) * grid.n_b + b] = 1;
    start = end + 1;
  }
  return mask;
}

std::vector<std::uint8_t> load_mask(const scid::Grid& grid, const std::string& path) {
  auto in = open_input(path);
  const scid::MaskData data = scid::read_mask(in);
  if (data.n_a != grid.n_a || data.n_b != grid.n_b) {
    throw std::runtime_error("mask is " + std::to_string(data.n_a) + "x" +
                             std::to_string(data.n_b) + ", grid bounding region is " +
                             std::to_string(grid.n_a) + "x" + std::to_string(grid.n_b));
  }
  return data.mask;
}

struct CommonOpts {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--config", c.config, "flat key=value config file");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "master seed (u64)");
  cmd->add_option("--threads", c.threads, "worker cap, 0 = hardware");
}

KeyValues load_config(const CommonOpts& c) {
  KeyValues kv;
  if (c.config) {
    auto in = open_input(*c.config);
    kv.kv = scid::read_kv(in);
  }
  return kv;
}

struct LoadedInputs {
  scid::Grid grid;
  scid::Cover cover;
  scid::WeightSequence weights;
};

LoadedInputs load_grid_cover_weights(const KeyValues& kv,
                                     const std::optional<std::string>& manifest_flag,
                                     const std::optional<std::string>& mask_flag,
                                     const std::optional<std::string>& weights_flag) {
  const std::string manifest_path = kv.require(manifest_flag, "manifest");
  auto min = open_input(manifest_path);
  const scid::Grid grid = scid::grid_from_manifest(scid::read_kv(min));
  const std::string mask_path = kv.require(mask_flag, "mask");
  const scid::Cover cover = scid::build_cover(grid, load_mask(grid, mask_path));
  const std::string weights_path = kv.require(weights_flag, "weights");
  auto win = open_input(weights_path);
  scid::WeightSequence w = scid::read_weights_csv(win);
  if (w.J != grid.J) throw std::runtime_error("weights file period does not match grid J");
  return {grid, cover, std::move(w)};
}

int cmd_gen(const CommonOpts& common, const std::optional<int>& J_flag,
            const std::optional<double>& T_flag, const std::optional<int>& nt_flag,
            const std::optional<int>& ng_flag, const std::optional<int>& na_flag,
            const std::optional<int>& nb_flag, const std::optional<std::string>& mask_flag,
            const std::optional<std::string>& cells_flag,
            const std::optional<std::string>& gen_flag, const std::optional<double>& value_flag) {
  const KeyValues kv = load_config(common);
  const scid::Grid grid = scid::build_grid(
      kv.require(J_flag, "J"), kv.require(T_flag, "T"), kv.require(nt_flag, "n_t"),
      kv.require(ng_flag, "n_g"), kv.require(na_flag, "n_a"), kv.require(nb_flag, "n_b"));

  std::vector<std::uint8_t> mask;
  if (kv.has(cells_flag, "cells")) {
    mask = mask_from_cells(grid, kv.require(cells_flag, "cells"));
  } else if (kv.has(mask_flag, "mask")) {
    mask = load_mask(grid, kv.require(mask_flag, "mask"));
  } else {
    throw std::runtime_error("gen needs --mask FILE or --cells a:b,...");
  }
  const scid::Cover cover = scid::build_cover(grid, mask);

  const std::uint64_t seed = kv.resolve(common.seed, "seed", std::uint64_t{12345});
  const std::string mode = kv.resolve(gen_flag, "gen", std::string("constant"));
  const double value = kv.resolve(value_flag, "value", 1.0);
  if (!(value > 0.0)) throw std::runtime_error("scattering value must be positive");

  const scid::WeightSequence w = scid::random_weights(grid.J, scid::mix_seed(seed, kSeedWeights));

  const std::size_t patch = static_cast<std::size_t>(grid.n_t) * grid.n_g;
  std::vector<std::vector<double>> values(cover.cells.size(), std::vector<double>(patch, 0.0));
  if (mode == "constant") {
    for (int j = 0; j < cover.occupied_count; ++j) {
      values[j].assign(patch, value);
    }
  } else if (mode == "random") {
    scid::Rng rng(scid::mix_seed(seed, kSeedScattering));
    for (int j = 0; j < cover.occupied_count; ++j) {
      for (auto& v : values[j]) v = value * (1.0 - rng.uniform01());  // (0, value]
    }
  } else {
    throw std::runtime_error("gen mode must be 'constant' or 'random', got '" + mode + "'");
  }
  const scid::ScatteringFunction sf = scid::make_scattering(grid, cover, std::move(values));

  const fs::path out_dir = kv.resolve(common.out, "out", std::string("."));
  fs::create_directories(out_dir);
  {
    auto out = open_output(out_dir / "manifest.txt");
    scid::write_grid_manifest(out, grid, seed);
  }
  {
    auto out = open_output(out_dir / "mask.txt");
    scid::write_mask(out, grid, cover);
  }
  {
    auto out = open_output(out_dir / "weights.csv");
    scid::write_weights_csv(out, w);
  }
  {
    auto out = open_output(out_dir / "scattering.csv");
    scid::write_scattering_csv(out, sf);
  }
  return 0;
}

int cmd_sound(const CommonOpts& common, const std::optional<std::string>& manifest_flag,
              const std::optional<std::string>& mask_flag,
              const std::optional<std::string>& weights_flag,
              const std::optional<std::string>& scattering_flag,
              const std::optional<int>& L_flag) {
  const KeyValues kv = load_config(common);
  const LoadedInputs inputs = load_grid_cover_weights(kv, manifest_flag, mask_flag, weights_flag);
  auto sin = open_input(kv.require(scattering_flag, "scattering"));
  const scid::ScatteringFunction sf =
      scid::read_scattering_csv(sin, inputs.grid, inputs.cover);

  const int L = kv.require(L_flag, "L");
  if (L < 1) throw std::runtime_error("L must be >= 1");
  const std::uint64_t seed = kv.resolve(common.seed, "seed", std::uint64_t{12345});
  const int threads = kv.resolve(common.threads, "threads", 1);

  const scid::EchoEnsemble ens = scid::sound_ensemble(
      sf, inputs.weights, L, scid::mix_seed(seed, kSeedSounding), threads);

  const fs::path out_dir = kv.resolve(common.out, "out", std::string("."));
  fs::create_directories(out_dir);
  auto out = open_output(out_dir / "echoes.bin");
  scid::write_echoes(out, ens);
  return 0;
}

int cmd_identify(const CommonOpts& common, const std::optional<std::string>& mode_flag,
                 const std::optional<std::string>& manifest_flag,
                 const std::optional<std::string>& mask_flag,
                 const std::optional<std::string>& weights_flag,
                 const std::optional<std::string>& scattering_flag,
                 const std::optional<std::string>& echoes_flag) {
  const KeyValues kv = load_config(common);
  const std::string mode = kv.require(mode_flag, "mode");
  if (mode != "oracle" && mode != "estimate") {
    throw std::runtime_error("mode must be 'oracle' or 'estimate', got '" + mode + "'");
  }
  const LoadedInputs inputs = load_grid_cover_weights(kv, manifest_flag, mask_flag, weights_flag);
  const std::uint64_t seed = kv.resolve(common.seed, "seed", std::uint64_t{12345});

  scid::Reconstruction rec;
  long long L = 0;
  std::optional<scid::ScatteringFunction> truth;
  if (kv.has(scattering_flag, "scattering")) {
    auto sin = open_input(kv.require(scattering_flag, "scattering"));
    truth = scid::read_scattering_csv(sin, inputs.grid, inputs.cover);
  }

  if (mode == "oracle") {
    if (!truth) throw std::runtime_error("oracle mode needs --scattering (the true function)");
    rec = scid::identify_oracle(*truth, inputs.weights);
  } else {
    auto ein = open_input(kv.require(echoes_flag, "echoes"));
    const scid::EchoEnsemble ens = scid::read_echoes(ein, inputs.grid);
    L = ens.L();
    rec = scid::estimate(ens, inputs.weights, inputs.cover);
  }

  const scid::FrameMatrices fm = scid::build_frame_matrices(inputs.weights, inputs.cover);
  const fs::path out_dir = kv.resolve(common.out, "out", std::string("."));
  fs::create_directories(out_dir);
  {
    auto out = open_output(out_dir / "identified.csv");
    scid::write_scattering_csv(out, rec.sf);
  }
  {
    std::vector<std::pair<std::string, std::string>> manifest = {
        {"mode", mode},
        {"seed", std::to_string(seed)},
        {"J", std::to_string(inputs.grid.J)},
        {"T", scid::format_double(inputs.grid.T)},
        {"n_t", std::to_string(inputs.grid.n_t)},
        {"n_g", std::to_string(inputs.grid.n_g)},
        {"L", std::to_string(L)},
        {"cond_U", scid::format_double(fm.cond)},
        {"max_imag_residue", scid::format_double(rec.max_imag_residue)},
        {"clamped_negatives", std::to_string(rec.clamped_negatives)},
    };
    if (truth) {
      manifest.emplace_back("max_rel_error",
                            scid::format_double(scid::max_rel_error(rec.sf, *truth)));
    }
    auto out = open_output(out_dir / "run_manifest.txt");
    scid::write_kv(out, manifest);
  }
  return 0;
}

int cmd_analyze(const CommonOpts& common, const std::optional<std::string>& manifest_flag,
                const std::optional<std::string>& mask_flag,
                const std::optional<std::string>& weights_flag,
                const std::optional<std::string>& scattering_flag,
                const std::optional<int>& L_flag, const std::optional<int>& trials_flag,
                const std::optional<int>& scaling_factor_flag,
                const std::optional<int>& scaling_trials_flag) {
  const KeyValues kv = load_config(common);
  const LoadedInputs inputs = load_grid_cover_weights(kv, manifest_flag, mask_flag, weights_flag);
  auto sin = open_input(kv.require(scattering_flag, "scattering"));
  const scid::ScatteringFunction sf =
      scid::read_scattering_csv(sin, inputs.grid, inputs.cover);

  scid::MCConfig cfg;
  cfg.L = kv.require(L_flag, "L");
  cfg.trials = kv.require(trials_flag, "trials");
  const std::uint64_t master_seed = kv.resolve(common.seed, "seed", std::uint64_t{12345});
  cfg.seed = scid::mix_seed(master_seed, kSeedAnalyze);
  cfg.threads = kv.resolve(common.threads, "threads", 1);
  cfg.scaling_factor = kv.resolve(scaling_factor_flag, "scaling_factor", 4);
  cfg.scaling_trials = kv.resolve(scaling_trials_flag, "scaling_trials", 200);
  cfg.scaling_check = cfg.scaling_factor > 1;
  cfg.ratio_lo = 2.0 * cfg.scaling_factor / 3.0;
  cfg.ratio_hi = 1.5 * cfg.scaling_factor;

  const scid::MCReport rep = scid::monte_carlo(sf, inputs.weights, inputs.cover, cfg);

  const fs::path out_dir = kv.resolve(common.out, "out", std::string("."));
  fs::create_directories(out_dir);
  auto out = open_output(out_dir / "report.txt");
  out << "master_seed=" << master_seed << '\n' << scid::format_mc_report(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) try {
  CLI::App app{"delay-Doppler channel simulation and scattering function recovery"};
  app.require_subcommand(1);

  CommonOpts c_gen, c_sound, c_identify, c_analyze;
  std::optional<int> g_J, g_nt, g_ng, g_na, g_nb;
  std::optional<double> g_T, g_value;
  std::optional<std::string> g_mask, g_cells, g_gen;
  auto* gen = app.add_subcommand("gen", "generate grid, cover, weights, scattering");
  add_common(gen, c_gen);
  gen->add_option("--J", g_J, "number of cover cells (prime)");
  gen->add_option("--T", g_T, "delay cell width / train period, seconds");
  gen->add_option("--n_t", g_nt, "delay samples per cell");
  gen->add_option("--n_g", g_ng, "Doppler samples per cell");
  gen->add_option("--n_a", g_na, "delay cells in the bounding region");
  gen->add_option("--n_b", g_nb, "Doppler cells in the bounding region");
  gen->add_option("--mask", g_mask, "mask file (n_a lines of n_b 0/1 chars)");
  gen->add_option("--cells", g_cells, "inline occupied cells, a:b,a:b,...");
  gen->add_option("--gen", g_gen, "scattering generator: constant | random");
  gen->add_option("--value", g_value, "scattering level (scale for random)");

  std::optional<std::string> s_manifest, s_mask, s_weights, s_scattering;
  std::optional<int> s_L;
  auto* sound = app.add_subcommand("sound", "simulate an ensemble of echoes");
  add_common(sound, c_sound);
  sound->add_option("--manifest", s_manifest, "grid manifest from gen");
  sound->add_option("--mask", s_mask, "mask file");
  sound->add_option("--weights", s_weights, "weights CSV");
  sound->add_option("--scattering", s_scattering, "scattering CSV");
  sound->add_option("--L", s_L, "number of echoes");

  std::optional<std::string> i_mode, i_manifest, i_mask, i_weights, i_scattering, i_echoes;
  auto* identify = app.add_subcommand("identify", "recover the scattering function");
  add_common(identify, c_identify);
  identify->add_option("--mode", i_mode, "oracle | estimate");
  identify->add_option("--manifest", i_manifest, "grid manifest from gen");
  identify->add_option("--mask", i_mask, "mask file");
  identify->add_option("--weights", i_weights, "weights CSV");
  identify->add_option("--scattering", i_scattering,
                       "true scattering CSV (required for oracle, optional truth for estimate)");
  identify->add_option("--echoes", i_echoes, "echo ensemble file (estimate mode)");

  std::optional<std::string> a_manifest, a_mask, a_weights, a_scattering;
  std::optional<int> a_L, a_trials, a_scaling_factor, a_scaling_trials;
  auto* analyze = app.add_subcommand("analyze", "Monte Carlo bias/variance report");
  add_common(analyze, c_analyze);
  analyze->add_option("--manifest", a_manifest, "grid manifest from gen");
  analyze->add_option("--mask", a_mask, "mask file");
  analyze->add_option("--weights", a_weights, "weights CSV");
  analyze->add_option("--scattering", a_scattering, "true scattering CSV");
  analyze->add_option("--L", a_L, "echoes per trial");
  analyze->add_option("--trials", a_trials, "independent trials");
  analyze->add_option("--scaling_factor", a_scaling_factor, "second batch at factor*L (0/1 off)");
  analyze->add_option("--scaling_trials", a_scaling_trials, "trials per scaling batch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(c_gen, g_J, g_T, g_nt, g_ng, g_na, g_nb, g_mask, g_cells, g_gen, g_value);
    }
    if (sound->parsed()) {
      return cmd_sound(c_sound, s_manifest, s_mask, s_weights, s_scattering, s_L);
    }
    if (identify->parsed()) {
      return cmd_identify(c_identify, i_mode, i_manifest, i_mask, i_weights, i_scattering,
                          i_echoes);
    }
    if (analyze->parsed()) {
      return cmd_analyze(c_analyze, a_manifest, a_mask, a_weights, a_scattering, a_L, a_trials,
                         a_scaling_factor, a_scaling_trials);
    }
  } catch (const scid::FrameConditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
} catch (const std::exception& e) {
  std::cerr << "error: " << e.what() << '\n';
  return kExitUsage;
} catch (...) {
  return kExitUsage;
}
