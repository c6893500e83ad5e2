// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace scid {

// Delay-Doppler discretization with a circular time axis.
//
// A cover tiles the support of the scattering function with J translates of
// the prototype rectangle [0,T) x [0,B), where B = 1/(J*T) so that J*B*T = 1:
// the J cells always have unit total area, whatever the bounding box looks
// like. Delays are sampled at dt = T/n_t, Dopplers at dg = B/n_g.
//
// The time axis is circular with J*n_g periods of length T, i.e.
// J*n_g*n_t samples. Its DFT frequency step 1/(J*n_g*T) equals dg, so every
// Doppler exponential used by the channel is exactly periodic on the axis and
// the identification identities hold to machine precision.
struct Grid {
  int J = 0;        // cells per cover and weight period; prime
  double T = 0.0;   // delay cell width = delta-train period, seconds
  int n_t = 0;      // delay samples per cell
  int n_g = 0;      // Doppler samples per cell
  int n_a = 0;      // delay cells in the bounding region
  int n_b = 0;      // Doppler cells in the bounding region
  double B = 0.0;   // Doppler cell width; derived, 1/(J*T)
  double dt = 0.0;  // delay step, T/n_t
  double dg = 0.0;  // Doppler step, B/n_g

  int periods() const { return J * n_g; }              // T-periods per revolution
  int total_samples() const { return J * n_g * n_t; }  // samples per revolution
  int delay_bins() const { return n_a * n_t; }
  int doppler_bins() const { return n_b * n_g; }

  bool same_shape(const Grid& o) const {
    return J == o.J && T == o.T && n_t == o.n_t && n_g == o.n_g;
  }
};

// Validates and derives. Rejects non-prime J (naming the smallest divisor),
// non-positive T, and supports that do not fit the circular model:
// n_a <= J*n_g (delay spread within one revolution) and n_b <= J*n_t
// (Doppler spread within the sampled band).
Grid build_grid(int J, double T, int n_t, int n_g, int n_a, int n_b);

struct Cell {
  int a = 0;  // delay cell offset, 0 <= a < n_a
  int b = 0;  // Doppler cell offset, 0 <= b < n_b
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Exactly J distinct cells. The first occupied_count entries carry scattering
// mass (row-major order of the input mask); the remainder are padding, chosen
// as the lexicographically smallest unused cells so covers are reproducible.
struct Cover {
  std::vector<Cell> cells;
  int occupied_count = 0;
};

// mask is n_a x n_b row-major (index a*n_b + b), nonzero = occupied.
Cover build_cover(const Grid& grid, const std::vector<std::uint8_t>& mask);

struct ScatteringFunction {
  Grid grid;
  Cover cover;
  // Per cell j an n_t x n_g patch, values[j][s*n_g + q] = C at delay
  // (a_j*n_t + s)*dt and Doppler (b_j*n_g + q)*dg.
  std::vector<std::vector<double>> values;

  std::size_t patch_index(int s, int q) const {
    return static_cast<std::size_t>(s) * grid.n_g + q;
  }
};

// Validating constructor for channel inputs: every value finite and >= 0,
// padding-cell patches identically zero. Reconstruction paths build the
// struct directly and may carry numerical residue instead.
ScatteringFunction make_scattering(const Grid& grid, const Cover& cover,
                                   std::vector<std::vector<double>> values);

// Dense n_a*n_t x n_b*n_g array (row-major), patch j copied to block
// (a_j, b_j). Cover cells are disjoint, so blocks never collide.
std::vector<double> assemble(const ScatteringFunction& sf);

// Inverse of assemble. Rejects nonzero mass outside the occupied cells,
// reporting the offending cell index.
ScatteringFunction extract_patches(const std::vector<double>& dense, const Grid& grid,
                                   const Cover& cover);

double scattering_max(const ScatteringFunction& sf);

// Discrete squared 2-norm: sum of C^2 * dt * dg over the fine grid.
double scattering_l2_squared(const ScatteringFunction& sf);

}  // namespace scid
