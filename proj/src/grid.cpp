// SPDX-License-Identifier: Apache-2.0
#include "scid/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scid {

namespace {

std::string cell_str(int a, int b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

Grid build_grid(int J, double T, int n_t, int n_g, int n_a, int n_b) {
  if (J < 2) {
    throw std::invalid_argument("J must be a prime >= 2, got " + std::to_string(J));
  }
  for (int d = 2; static_cast<long long>(d) * d <= J; ++d) {
    if (J % d == 0) {
      throw std::invalid_argument("J = " + std::to_string(J) + " = " + std::to_string(d) +
                                  "*" + std::to_string(J / d) + " is not prime");
    }
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw std::invalid_argument("train period T must be positive and finite");
  }
  if (n_t < 1 || n_g < 1 || n_a < 1 || n_b < 1) {
    throw std::invalid_argument("n_t, n_g, n_a, n_b must all be >= 1");
  }
  if (static_cast<long long>(n_a) > static_cast<long long>(J) * n_g) {
    throw std::invalid_argument("n_a = " + std::to_string(n_a) + " exceeds J*n_g = " +
                                std::to_string(static_cast<long long>(J) * n_g) +
                                "; the delay support must fit one revolution of the "
                                "circular time axis");
  }
  if (static_cast<long long>(n_b) > static_cast<long long>(J) * n_t) {
    throw std::invalid_argument("n_b = " + std::to_string(n_b) + " exceeds J*n_t = " +
                                std::to_string(static_cast<long long>(J) * n_t) +
                                "; the Doppler support must fit the sampled band");
  }
  const long long total = static_cast<long long>(J) * n_g * n_t;
  if (total > (1LL << 28)) {
    throw std::invalid_argument("grid too large: J*n_g*n_t = " + std::to_string(total));
  }

  Grid g;
  g.J = J;
  g.T = T;
  g.n_t = n_t;
  g.n_g = n_g;
  g.n_a = n_a;
  g.n_b = n_b;
  g.B = 1.0 / (J * T);
  g.dt = T / n_t;
  g.dg = g.B / n_g;
  return g;
}

Cover build_cover(const Grid& grid, const std::vector<std::uint8_t>& mask) {
  const std::size_t expected = static_cast<std::size_t>(grid.n_a) * grid.n_b;
  if (mask.size() != expected) {
    throw std::invalid_argument("mask has " + std::to_string(mask.size()) +
                                " cells, grid bounding region has " + std::to_string(expected));
  }
  if (static_cast<long long>(grid.n_a) * grid.n_b < grid.J) {
    throw std::invalid_argument("bounding region has " + std::to_string(expected) +
                                " cells, fewer than J = " + std::to_string(grid.J) +
                                "; a cover needs J distinct cells");
  }

  Cover cover;
  cover.cells.reserve(grid.J);
  for (int a = 0; a < grid.n_a; ++a) {
    for (int b = 0; b < grid.n_b; ++b) {
      if (mask[static_cast<std::size_t>(a) * grid.n_b + b]) {
        cover.cells.push_back({a, b});
      }
    }
  }
  cover.occupied_count = static_cast<int>(cover.cells.size());
  if (cover.occupied_count > grid.J) {
    throw std::invalid_argument("mask marks " + std::to_string(cover.occupied_count) +
                                " cells but the cover holds only J = " +
                                std::to_string(grid.J) + "; raise J or coarsen the support");
  }

  // Pad with the lexicographically smallest unused cells.
  for (int a = 0; a < grid.n_a && static_cast<int>(cover.cells.size()) < grid.J; ++a) {
    for (int b = 0; b < grid.n_b && static_cast<int>(cover.cells.size()) < grid.J; ++b) {
      if (!mask[static_cast<std::size_t>(a) * grid.n_b + b]) {
        cover.cells.push_back({a, b});
      }
    }
  }
  return cover;
}

ScatteringFunction make_scattering(const Grid& grid, const Cover& cover,
                                   std::vector<std::vector<double>> values) {
  if (static_cast<int>(cover.cells.size()) != grid.J) {
    throw std::invalid_argument("cover must hold exactly J cells");
  }
  if (values.size() != cover.cells.size()) {
    throw std::invalid_argument("need one patch per cover cell");
  }
  const std::size_t patch = static_cast<std::size_t>(grid.n_t) * grid.n_g;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j].size() != patch) {
      throw std::invalid_argument("patch " + std::to_string(j) + " has wrong size");
    }
    for (double v : values[j]) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("scattering values must be finite and >= 0");
      }
      if (static_cast<int>(j) >= cover.occupied_count && v != 0.0) {
        throw std::invalid_argument("padding cell " + std::to_string(j) +
                                    " carries nonzero scattering mass");
      }
    }
  }
  return ScatteringFunction{grid, cover, std::move(values)};
}

std::vector<double> assemble(const ScatteringFunction& sf) {
  const Grid& g = sf.grid;
  std::vector<double> dense(static_cast<std::size_t>(g.delay_bins()) * g.doppler_bins(), 0.0);
  const int cols = g.doppler_bins();
  for (std::size_t j = 0; j < sf.cover.cells.size(); ++j) {
    const Cell& c = sf.cover.cells[j];
    for (int s = 0; s < g.n_t; ++s) {
      for (int q = 0; q < g.n_g; ++q) {
        const std::size_t row = static_cast<std::size_t>(c.a) * g.n_t + s;
        const std::size_t col = static_cast<std::size_t>(c.b) * g.n_g + q;
        dense[row * cols + col] = sf.values[j][sf.patch_index(s, q)];
      }
    }
  }
  return dense;
}

ScatteringFunction extract_patches(const std::vector<double>& dense, const Grid& grid,
                                   const Cover& cover) {
  const std::size_t want = static_cast<std::size_t>(grid.delay_bins()) * grid.doppler_bins();
  if (dense.size() != want) {
    throw std::invalid_argument("dense array has " + std::to_string(dense.size()) +
                                " entries, expected " + std::to_string(want));
  }
  const int cols = grid.doppler_bins();
  const std::size_t patch = static_cast<std::size_t>(grid.n_t) * grid.n_g;

  std::vector<std::vector<double>> values(cover.cells.size(), std::vector<double>(patch, 0.0));
  std::vector<std::uint8_t> occupied(static_cast<std::size_t>(grid.n_a) * grid.n_b, 0);
  for (int j = 0; j < cover.occupied_count; ++j) {
    const Cell& c = cover.cells[j];
    occupied[static_cast<std::size_t>(c.a) * grid.n_b + c.b] = 1;
    for (int s = 0; s < grid.n_t; ++s) {
      for (int q = 0; q < grid.n_g; ++q) {
        const std::size_t row = static_cast<std::size_t>(c.a) * grid.n_t + s;
        const std::size_t col = static_cast<std::size_t>(c.b) * grid.n_g + q;
        values[j][static_cast<std::size_t>(s) * grid.n_g + q] = dense[row * cols + col];
      }
    }
  }

  // Everything outside the occupied cells must be zero.
  for (int a = 0; a < grid.n_a; ++a) {
    for (int b = 0; b < grid.n_b; ++b) {
      if (occupied[static_cast<std::size_t>(a) * grid.n_b + b]) continue;
      for (int s = 0; s < grid.n_t; ++s) {
        for (int q = 0; q < grid.n_g; ++q) {
          const std::size_t row = static_cast<std::size_t>(a) * grid.n_t + s;
          const std::size_t col = static_cast<std::size_t>(b) * grid.n_g + q;
          if (dense[row * cols + col] != 0.0) {
            throw std::invalid_argument("nonzero mass outside the occupied cover at cell " +
                                        cell_str(a, b));
          }
        }
      }
    }
  }
  return make_scattering(grid, cover, std::move(values));
}

double scattering_max(const ScatteringFunction& sf) {
  double m = 0.0;
  for (const auto& patch : sf.values) {
    for (double v : patch) m = std::max(m, std::abs(v));
  }
  return m;
}

double scattering_l2_squared(const ScatteringFunction& sf) {
  double acc = 0.0;
  for (const auto& patch : sf.values) {
    for (double v : patch) acc += v * v;
  }
  return acc * sf.grid.dt * sf.grid.dg;
}

}  // namespace scid
