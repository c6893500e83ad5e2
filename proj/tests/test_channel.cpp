// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>

#include "doctest.h"
#include "helpers.hpp"
#include "scid/channel.hpp"
#include "scid/util.hpp"

using namespace scid;
using cd = std::complex<double>;

namespace {

Cover cover_of(const Grid& g, std::initializer_list<Cell> occupied) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(g.n_a) * g.n_b, 0);
  for (const Cell& c : occupied) m[static_cast<std::size_t>(c.a) * g.n_b + c.b] = 1;
  return build_cover(g, m);
}

ScatteringFunction zero_sf(const Grid& g, const Cover& cover) {
  return make_scattering(
      g, cover,
      std::vector<std::vector<double>>(
          cover.cells.size(), std::vector<double>(static_cast<std::size_t>(g.n_t) * g.n_g, 0.0)));
}

}  // namespace

TEST_CASE("zero scattering gives a zero spreading realization and zero echo") {
  const Grid g = build_grid(2, 1.0, 2, 2, 2, 1);
  const Cover cover = cover_of(g, {{0, 0}, {1, 0}});
  const ScatteringFunction sf = zero_sf(g, cover);
  const SpreadingRealization real = sample_spreading(sf, 4);
  for (const auto& patch : real.eta) {
    for (const cd& z : patch) CHECK(z == cd(0, 0));
  }
  const Echo echo = sound(real, random_weights(2, 5));
  for (const cd& z : echo.y) CHECK(z == cd(0, 0));
}

TEST_CASE("sample_spreading is deterministic per seed") {
  const Grid g = build_grid(3, 0.5, 2, 2, 3, 2);
  Rng rng(1);
  const Cover cover = scid_test::random_cover(g, 2, rng);  // one padding cell
  const ScatteringFunction sf = scid_test::random_scattering(g, cover, rng);
  const SpreadingRealization padded = sample_spreading(sf, 123);
  for (const cd& z : padded.eta[2]) {
    CHECK(z == cd(0, 0));  // padding cells carry no weight
  }
  const SpreadingRealization a = sample_spreading(sf, 123);
  const SpreadingRealization b = sample_spreading(sf, 123);
  const SpreadingRealization c = sample_spreading(sf, 124);
  double diff = 0.0;
  for (std::size_t j = 0; j < a.eta.size(); ++j) {
    for (std::size_t i = 0; i < a.eta[j].size(); ++i) {
      CHECK(a.eta[j][i] == b.eta[j][i]);
      diff = std::max(diff, std::abs(a.eta[j][i] - c.eta[j][i]));
    }
  }
  CHECK(diff > 1e-6);
}

TEST_CASE("spreading moments: E|eta|^2 = C*dt*dg, E[eta^2] = 0, cross terms vanish") {
  const Grid g = build_grid(2, 1.0, 2, 1, 2, 1);
  const Cover cover = cover_of(g, {{0, 0}});
  std::vector<std::vector<double>> values(2, std::vector<double>(2, 0.0));
  values[0][0] = 1.0;
  values[0][1] = 0.5;
  const ScatteringFunction sf = make_scattering(g, cover, std::move(values));

  const int n = 100000;
  KahanSum<double> power0, power1;
  KahanSum<cd> square0, cross;
  for (int i = 0; i < n; ++i) {
    const SpreadingRealization real = sample_spreading(sf, 1000 + i);
    power0.add(std::norm(real.eta[0][0]));
    power1.add(std::norm(real.eta[0][1]));
    square0.add(real.eta[0][0] * real.eta[0][0]);
    cross.add(std::conj(real.eta[0][0]) * real.eta[0][1]);
  }
  const double dm = g.dt * g.dg;
  // SE of |eta|^2 estimates: Var(|z|^2) = (C*dm)^2 for proper Gaussian z
  const double se0 = 1.0 * dm / std::sqrt(n);
  CHECK(std::abs(power0.value() / n - 1.0 * dm) <= 5 * se0);
  const double se1 = 0.5 * dm / std::sqrt(n);
  CHECK(std::abs(power1.value() / n - 0.5 * dm) <= 5 * se1);
  // Var(eta^2) = 2 (C*dm)^2 for a proper Gaussian
  CHECK(std::abs(square0.value() / static_cast<double>(n)) <=
        5 * std::sqrt(2.0) * 1.0 * dm / std::sqrt(n));
  CHECK(std::abs(cross.value() / static_cast<double>(n)) <=
        5 * std::sqrt(1.0 * 0.5) * dm / std::sqrt(n));
}

TEST_CASE("a single zero-Doppler scatterer echoes the train itself") {
  const Grid g = build_grid(2, 1.0, 2, 1, 2, 1);
  const Cover cover = cover_of(g, {{0, 0}, {1, 0}});
  SpreadingRealization real;
  real.grid = g;
  real.cover = cover;
  real.eta.assign(2, std::vector<cd>(static_cast<std::size_t>(g.n_t) * g.n_g, cd(0, 0)));
  const cd eta0(0.7, -0.3);
  real.eta[0][0] = eta0;  // cell (0,0), s = 0, q = 0

  const WeightSequence ones = make_weights({cd(1, 0), cd(1, 0)});
  const Echo echo = sound(real, ones);
  for (int x = 0; x < g.total_samples(); ++x) {
    if (x % g.n_t == 0) {
      CHECK(std::abs(echo.y[x] - eta0 * g.dg) < 1e-15);
    } else {
      CHECK(echo.y[x] == cd(0, 0));
    }
  }
}

TEST_CASE("sound is linear in the spreading weights") {
  const Grid g = build_grid(3, 0.7, 2, 2, 3, 2);
  Rng rng(2);
  const Cover cover = scid_test::random_cover(g, 3, rng);
  const ScatteringFunction sf = scid_test::random_scattering(g, cover, rng);
  const WeightSequence w = random_weights(3, 9);

  SpreadingRealization r1 = sample_spreading(sf, 50);
  const SpreadingRealization r2 = sample_spreading(sf, 51);
  const Echo y1 = sound(r1, w);
  const Echo y2 = sound(r2, w);
  for (std::size_t j = 0; j < r1.eta.size(); ++j) {
    for (std::size_t i = 0; i < r1.eta[j].size(); ++i) r1.eta[j][i] += r2.eta[j][i];
  }
  const Echo ysum = sound(r1, w);
  double scale = 0.0;
  for (const cd& z : ysum.y) scale = std::max(scale, std::abs(z));
  for (int x = 0; x < g.total_samples(); ++x) {
    CHECK(std::abs(ysum.y[x] - (y1.y[x] + y2.y[x])) <= 1e-12 * std::max(scale, 1.0));
  }
}

TEST_CASE("sound_ensemble uses seed_base + l per realization") {
  const Grid g = build_grid(2, 1.0, 1, 2, 2, 1);
  Rng rng(3);
  const Cover cover = scid_test::random_cover(g, 2, rng);
  const ScatteringFunction sf = scid_test::random_scattering(g, cover, rng);
  const WeightSequence w = random_weights(2, 4);
  const EchoEnsemble ens = sound_ensemble(sf, w, 4, 9000, 1);
  const EchoEnsemble ens2 = sound_ensemble(sf, w, 4, 9000, 3);  // threads must not matter
  for (int l = 0; l < 4; ++l) {
    const Echo direct = sound(sample_spreading(sf, 9000 + l), w);
    for (int x = 0; x < g.total_samples(); ++x) {
      CHECK(ens.y[l][x] == direct.y[x]);
      CHECK(ens2.y[l][x] == direct.y[x]);
    }
  }
  CHECK_THROWS_AS(sound_ensemble(sf, w, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("true_acf of a Doppler-flat patch collapses on the 1/B lag grid") {
  const Grid g = build_grid(2, 1.0, 2, 4, 2, 1);
  const Cover cover = cover_of(g, {{0, 0}});
  const double kappa = 0.8;
  std::vector<std::vector<double>> values(2, std::vector<double>(8, 0.0));
  values[0].assign(8, kappa);
  const TrueAcf acf = true_acf(make_scattering(g, cover, std::move(values)));

  // lags m/B = m*J*T: P_hj = kappa*B at m = 0, zero at m = 1..n_g-1
  for (int m = 0; m < g.n_g; ++m) {
    for (int s = 0; s < g.n_t; ++s) {
      const cd v = acf.per_cell[0][acf.cell_index(m * g.J, s)];
      if (m == 0) {
        CHECK(v.real() == doctest::Approx(kappa * g.B));
        CHECK(std::abs(v.imag()) < 1e-15);
      } else {
        CHECK(std::abs(v) < 1e-14);
      }
    }
  }
}

TEST_CASE("true_acf: zero input, nonnegative zero lag, Hermitian lag symmetry") {
  const Grid g = build_grid(3, 0.6, 2, 3, 3, 2);
  Rng rng(5);
  const Cover cover = scid_test::random_cover(g, 2, rng);
  const ScatteringFunction zero = zero_sf(g, cover);
  const TrueAcf zacf = true_acf(zero);
  for (const cd& z : zacf.composite) CHECK(z == cd(0, 0));

  const ScatteringFunction sf = scid_test::random_scattering(g, cover, rng);
  const TrueAcf acf = true_acf(sf);
  const int P = g.periods();
  for (int d = 0; d < g.delay_bins(); ++d) {
    const cd zl = acf.composite[acf.composite_index(0, d)];
    CHECK(zl.real() >= -1e-15);
    CHECK(std::abs(zl.imag()) <= 1e-15);
  }
  for (int n = 1; n < P; ++n) {
    for (int d = 0; d < g.delay_bins(); ++d) {
      const cd fwd = acf.composite[acf.composite_index(n, d)];
      const cd rev = acf.composite[acf.composite_index(P - n, d)];
      CHECK(std::abs(rev - std::conj(fwd)) <= 1e-13);
    }
  }
}

TEST_CASE("echo second moments match the analytic prediction (Monte Carlo)") {
  const Grid g = build_grid(2, 1.0, 2, 2, 2, 2);  // N_total = 8
  Rng rng(6);
  const Cover cover = scid_test::random_cover(g, 2, rng);
  const ScatteringFunction sf = scid_test::random_scattering(g, cover, rng);
  const WeightSequence w = random_weights(2, 8);

  const int L = 10000;
  const int N = g.total_samples();
  std::vector<std::vector<cd>> echoes(L);
  for (int l = 0; l < L; ++l) echoes[l] = sound(sample_spreading(sf, 40000 + l), w).y;

  for (int xc = 0; xc < N; ++xc) {
    for (int x = 0; x < N; ++x) {
      KahanSum<cd> acc;
      KahanSum<double> acc2;
      for (int l = 0; l < L; ++l) {
        const cd v = std::conj(echoes[l][xc]) * echoes[l][x];
        acc.add(v);
        acc2.add(std::norm(v));
      }
      const cd mean = acc.value() / static_cast<double>(L);
      const double var = std::max(acc2.value() / L - std::norm(mean), 0.0);
      const double se = std::sqrt(var / L);
      const cd exact = echo_cross_moment(sf, w, xc, x);
      CHECK(std::abs(mean - exact) <= 5 * se + 1e-18);
    }
  }

  // energy: E[sum |y|^2 dt] matches the analytic diagonal
  double analytic = 0.0;
  for (int x = 0; x < N; ++x) analytic += echo_cross_moment(sf, w, x, x).real() * g.dt;
  KahanSum<double> emp;
  KahanSum<double> emp2;
  for (int l = 0; l < L; ++l) {
    double e = 0.0;
    for (const cd& z : echoes[l]) e += std::norm(z) * g.dt;
    emp.add(e);
    emp2.add(e * e);
  }
  const double mean_e = emp.value() / L;
  const double se_e = std::sqrt(std::max(emp2.value() / L - mean_e * mean_e, 0.0) / L);
  CHECK(std::abs(mean_e - analytic) <= 5 * se_e);
}

TEST_CASE("echo_cross_moment vanishes off the delay-aligned pairs") {
  const Grid g = build_grid(2, 1.0, 3, 1, 2, 1);
  Rng rng(61);
  const Cover cover = scid_test::random_cover(g, 2, rng);
  const ScatteringFunction sf = scid_test::random_scattering(g, cover, rng);
  const WeightSequence w = random_weights(2, 62);
  CHECK(echo_cross_moment(sf, w, 0, 1) == cd(0, 0));
  CHECK(echo_cross_moment(sf, w, 2, 4) == cd(0, 0));
  CHECK_THROWS_AS(echo_cross_moment(sf, w, -1, 0), std::invalid_argument);
}
