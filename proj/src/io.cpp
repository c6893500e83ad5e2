// SPDX-License-Identifier: Apache-2.0
#include "scid/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace scid {

namespace {

constexpr std::uint32_t kEchoVersion = 1;
const char kEchoMagic[4] = {'S', 'C', 'I', 'D'};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string strip(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

void put_u32_le(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

std::uint32_t get_u32_le(std::istream& in) {
  char b[4];
  in.read(b, 4);
  if (!in) throw std::runtime_error("echo file truncated in header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return v;
}

void put_f64_le(std::ostream& out, double v) {
  const std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  out.write(b, 8);
}

double get_f64_le(std::istream& in) {
  char b[8];
  in.read(b, 8);
  if (!in) throw std::runtime_error("echo file truncated in payload");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) {
    u |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return std::bit_cast<double>(u);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

long long parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(strip(text), &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse integer for '" + key + "': " + text);
  }
  if (used != strip(text).size()) {
    throw std::invalid_argument("trailing characters in integer for '" + key + "': " + text);
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(strip(text), &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse unsigned integer for '" + key + "': " + text);
  }
  if (used != strip(text).size()) {
    throw std::invalid_argument("trailing characters in unsigned integer for '" + key +
                                "': " + text);
  }
  return v;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(strip(text), &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse number for '" + key + "': " + text);
  }
  if (used != strip(text).size()) {
    throw std::invalid_argument("trailing characters in number for '" + key + "': " + text);
  }
  return v;
}

void write_scattering_csv(std::ostream& out, const ScatteringFunction& sf) {
  out << "a,b,s,q,value\n";
  for (std::size_t j = 0; j < sf.cover.cells.size(); ++j) {
    const Cell& c = sf.cover.cells[j];
    for (int s = 0; s < sf.grid.n_t; ++s) {
      for (int q = 0; q < sf.grid.n_g; ++q) {
        const double v = sf.values[j][sf.patch_index(s, q)];
        if (v != 0.0) {
          out << c.a << ',' << c.b << ',' << s << ',' << q << ',' << format_double(v) << '\n';
        }
      }
    }
  }
}

ScatteringFunction read_scattering_csv(std::istream& in, const Grid& grid, const Cover& cover) {
  std::string line;
  if (!std::getline(in, line) || strip(line) != "a,b,s,q,value") {
    throw std::runtime_error("scattering CSV must start with header 'a,b,s,q,value'");
  }
  const std::size_t patch = static_cast<std::size_t>(grid.n_t) * grid.n_g;
  std::vector<std::vector<double>> values(cover.cells.size(), std::vector<double>(patch, 0.0));
  std::vector<std::vector<std::uint8_t>> seen(cover.cells.size(),
                                              std::vector<std::uint8_t>(patch, 0));
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) {
      throw std::runtime_error("scattering CSV line " + std::to_string(line_no) +
                               ": expected 5 fields");
    }
    const int a = static_cast<int>(parse_int("a", f[0]));
    const int b = static_cast<int>(parse_int("b", f[1]));
    const int s = static_cast<int>(parse_int("s", f[2]));
    const int q = static_cast<int>(parse_int("q", f[3]));
    const double v = parse_double("value", f[4]);
    if (s < 0 || s >= grid.n_t || q < 0 || q >= grid.n_g) {
      throw std::runtime_error("scattering CSV line " + std::to_string(line_no) +
                               ": sample index out of range");
    }
    int j = -1;
    for (int i = 0; i < cover.occupied_count; ++i) {
      if (cover.cells[i].a == a && cover.cells[i].b == b) {
        j = i;
        break;
      }
    }
    if (j < 0) {
      throw std::runtime_error("scattering CSV line " + std::to_string(line_no) + ": cell (" +
                               std::to_string(a) + ", " + std::to_string(b) +
                               ") is not an occupied cover cell");
    }
    const std::size_t idx = static_cast<std::size_t>(s) * grid.n_g + q;
    if (seen[j][idx]) {
      throw std::runtime_error("scattering CSV line " + std::to_string(line_no) +
                               ": duplicate point");
    }
    seen[j][idx] = 1;
    values[j][idx] = v;
  }
  return make_scattering(grid, cover, std::move(values));
}

void write_weights_csv(std::ostream& out, const WeightSequence& w) {
  out << "k,re,im\n";
  for (int k = 0; k < w.J; ++k) {
    out << k << ',' << format_double(w.c[k].real()) << ',' << format_double(w.c[k].imag())
        << '\n';
  }
}

WeightSequence read_weights_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip(line) != "k,re,im") {
    throw std::runtime_error("weights CSV must start with header 'k,re,im'");
  }
  std::vector<std::complex<double>> c;
  int expected_k = 0;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3) throw std::runtime_error("weights CSV: expected 3 fields");
    if (parse_int("k", f[0]) != expected_k) {
      throw std::runtime_error("weights CSV: rows must be ordered k = 0..J-1");
    }
    c.emplace_back(parse_double("re", f[1]), parse_double("im", f[2]));
    ++expected_k;
  }
  return make_weights(std::move(c));
}

void write_mask(std::ostream& out, const Grid& grid, const Cover& cover) {
  std::vector<std::string> rows(grid.n_a, std::string(grid.n_b, '0'));
  for (int j = 0; j < cover.occupied_count; ++j) {
    rows[cover.cells[j].a][cover.cells[j].b] = '1';
  }
  for (const auto& row : rows) out << row << '\n';
}

MaskData read_mask(std::istream& in) {
  MaskData data;
  std::string line;
  while (std::getline(in, line)) {
    const std::string row = strip(line);
    if (row.empty()) continue;
    if (data.n_b == 0) {
      data.n_b = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != data.n_b) {
      throw std::runtime_error("mask rows have inconsistent lengths");
    }
    for (char ch : row) {
      if (ch != '0' && ch != '1') throw std::runtime_error("mask must contain only '0'/'1'");
      data.mask.push_back(ch == '1' ? 1 : 0);
    }
    ++data.n_a;
  }
  if (data.n_a == 0) throw std::runtime_error("mask file is empty");
  return data;
}

void write_echoes(std::ostream& out, const EchoEnsemble& ens) {
  out.write(kEchoMagic, 4);
  put_u32_le(out, kEchoVersion);
  put_u32_le(out, static_cast<std::uint32_t>(ens.grid.J));
  put_u32_le(out, static_cast<std::uint32_t>(ens.grid.n_t));
  put_u32_le(out, static_cast<std::uint32_t>(ens.grid.n_g));
  put_u32_le(out, static_cast<std::uint32_t>(ens.L()));
  for (const auto& y : ens.y) {
    for (const auto& z : y) {
      put_f64_le(out, z.real());
      put_f64_le(out, z.imag());
    }
  }
}

EchoEnsemble read_echoes(std::istream& in, const Grid& grid) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kEchoMagic, 4) != 0) {
    throw std::runtime_error("not an echo ensemble file (bad magic)");
  }
  const std::uint32_t version = get_u32_le(in);
  if (version != kEchoVersion) {
    throw std::runtime_error("unsupported echo file version " + std::to_string(version));
  }
  const std::uint32_t J = get_u32_le(in);
  const std::uint32_t n_t = get_u32_le(in);
  const std::uint32_t n_g = get_u32_le(in);
  const std::uint32_t L = get_u32_le(in);
  if (J != static_cast<std::uint32_t>(grid.J) || n_t != static_cast<std::uint32_t>(grid.n_t) ||
      n_g != static_cast<std::uint32_t>(grid.n_g)) {
    throw std::runtime_error("echo file header does not match the grid");
  }
  if (L < 1) throw std::runtime_error("echo file holds an empty ensemble");

  EchoEnsemble ens;
  ens.grid = grid;
  ens.y.assign(L, std::vector<std::complex<double>>(grid.total_samples()));
  for (auto& y : ens.y) {
    for (auto& z : y) {
      const double re = get_f64_le(in);
      const double im = get_f64_le(in);
      z = {re, im};
    }
  }
  char extra;
  if (in.read(&extra, 1)) throw std::runtime_error("echo file has trailing bytes");
  return ens;
}

void write_kv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [key, value] : kv) out << key << '=' << value << '\n';
}

std::map<std::string, std::string> read_kv(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = strip(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t pos = t.find('=');
    if (pos == std::string::npos) {
      throw std::runtime_error("expected key=value, got: " + t);
    }
    kv[strip(t.substr(0, pos))] = strip(t.substr(pos + 1));
  }
  return kv;
}

void write_grid_manifest(std::ostream& out, const Grid& grid, std::uint64_t seed) {
  write_kv(out, {
                    {"format", "scid-manifest-1"},
                    {"J", std::to_string(grid.J)},
                    {"T", format_double(grid.T)},
                    {"n_t", std::to_string(grid.n_t)},
                    {"n_g", std::to_string(grid.n_g)},
                    {"n_a", std::to_string(grid.n_a)},
                    {"n_b", std::to_string(grid.n_b)},
                    {"seed", std::to_string(seed)},
                });
}

Grid grid_from_manifest(const std::map<std::string, std::string>& kv) {
  const auto need = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error(std::string("manifest is missing '") + key + "'");
    return it->second;
  };
  return build_grid(static_cast<int>(parse_int("J", need("J"))), parse_double("T", need("T")),
                    static_cast<int>(parse_int("n_t", need("n_t"))),
                    static_cast<int>(parse_int("n_g", need("n_g"))),
                    static_cast<int>(parse_int("n_a", need("n_a"))),
                    static_cast<int>(parse_int("n_b", need("n_b"))));
}

}  // namespace scid
