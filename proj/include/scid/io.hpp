// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "scid/channel.hpp"
#include "scid/gabor.hpp"
#include "scid/grid.hpp"

namespace scid {

// Scattering CSV: header "a,b,s,q,value", one row per fine-grid point with a
// nonzero value; integer cell/sample coordinates, value printed with 17
// significant digits (round-trips bit-exactly).
void write_scattering_csv(std::ostream& out, const ScatteringFunction& sf);
ScatteringFunction read_scattering_csv(std::istream& in, const Grid& grid, const Cover& cover);

// Weights CSV: header "k,re,im", rows k = 0..J-1 in order, 17 significant
// digits for a bit-faithful reload.
void write_weights_csv(std::ostream& out, const WeightSequence& w);
WeightSequence read_weights_csv(std::istream& in);

// Mask file: n_a lines of n_b characters, '1' marks an occupied cell.
void write_mask(std::ostream& out, const Grid& grid, const Cover& cover);
struct MaskData {
  int n_a = 0;
  int n_b = 0;
  std::vector<std::uint8_t> mask;  // row-major a*n_b + b
};
MaskData read_mask(std::istream& in);

// Echo ensemble: binary, header {magic "SCID", version u32 = 1, J, n_t, n_g,
// L as u32}, then L * N_total complex samples as little-endian f64 (re, im)
// pairs.
void write_echoes(std::ostream& out, const EchoEnsemble& ens);
EchoEnsemble read_echoes(std::istream& in, const Grid& grid);

// Flat key=value records ('#' starts a comment line).
void write_kv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv);
std::map<std::string, std::string> read_kv(std::istream& in);

void write_grid_manifest(std::ostream& out, const Grid& grid, std::uint64_t seed);
// Rebuilds the grid (re-validating all invariants) from manifest keys.
Grid grid_from_manifest(const std::map<std::string, std::string>& kv);

// Strict numeric parsers; throw std::invalid_argument naming the key.
long long parse_int(const std::string& key, const std::string& text);
std::uint64_t parse_u64(const std::string& key, const std::string& text);
double parse_double(const std::string& key, const std::string& text);

std::string format_double(double v);  // %.17g

}  // namespace scid
