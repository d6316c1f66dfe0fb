#include <gtest/gtest.h>

#include <complex>
#include <vector>

#include "anosov/core.hpp"
#include "anosov/cutoff.hpp"
#include "anosov/grid.hpp"

using namespace anosov;

namespace {

// Naive DFT oracle for the FFT.
std::vector<cplx> dft(const std::vector<cplx>& a, bool inverse) {
  size_t n = a.size();
  std::vector<cplx> out(n, cplx(0));
  double sgn = inverse ? 1.0 : -1.0;
  for (size_t k = 0; k < n; ++k)
    for (size_t j = 0; j < n; ++j)
      out[k] += a[j] * std::polar(1.0, sgn * kTwoPi * double(j * k % n) / n);
  return out;
}

TEST(Fft, MatchesNaiveDftPow2) {
  Rng rng(7);
  for (size_t n : {8u, 64u, 128u}) {
    std::vector<cplx> a(n);
    for (auto& v : a) v = cplx(rng.normal(), rng.normal());
    auto want = dft(a, false);
    auto got = a;
    fft(got.data(), n, false);
    for (size_t i = 0; i < n; ++i)
      ASSERT_NEAR(std::abs(got[i] - want[i]), 0.0, 1e-9) << "n=" << n;
  }
}

TEST(Fft, MatchesNaiveDftBluestein) {
  Rng rng(11);
  for (size_t n : {6u, 12u, 20u, 48u}) {
    std::vector<cplx> a(n);
    for (auto& v : a) v = cplx(rng.normal(), rng.normal());
    auto want = dft(a, false);
    auto got = a;
    fft(got.data(), n, false);
    for (size_t i = 0; i < n; ++i)
      ASSERT_NEAR(std::abs(got[i] - want[i]), 0.0, 1e-8) << "n=" << n;
  }
}

TEST(Fft, RoundTrip) {
  Rng rng(3);
  std::vector<cplx> a(256);
  for (auto& v : a) v = cplx(rng.normal(), rng.normal());
  auto b = a;
  fft(b.data(), b.size(), false);
  fft(b.data(), b.size(), true);
  for (size_t i = 0; i < a.size(); ++i)
    ASSERT_NEAR(std::abs(b[i] / double(a.size()) - a[i]), 0.0, 1e-12);
}

TEST(Cutoff, StepProperties) {
  CutoffSpec c;
  EXPECT_EQ(c.psi(0.0), 1.0);
  EXPECT_EQ(c.psi(1.0), 1.0);
  EXPECT_EQ(c.psi(1.5), 1.0);   // plateau extends to 1.5
  EXPECT_EQ(c.psi(2.0), 0.0);
  EXPECT_EQ(c.psi(3.0), 0.0);
  double mid = c.psi(1.75);
  EXPECT_GT(mid, 0.0);
  EXPECT_LT(mid, 1.0);
  EXPECT_NEAR(c.psi(1.75), 0.5, 1e-12);  // symmetric kernel
  // monotone on the transition
  double prev = 1.0;
  for (double r = 1.5; r <= 2.0; r += 0.01) {
    double v = c.psi(r);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }
}

TEST(Cutoff, BandTelescoping) {
  CutoffSpec c;
  for (double xi : {0.0, 0.7, 3.0, 17.5, 200.0}) {
    double s = 0;
    for (int j = 0; j <= 12; ++j) s += c.phi(j, xi);
    EXPECT_NEAR(s, c.psi(std::ldexp(xi, -12)), 1e-14);
  }
}

TEST(Grid, RoundTripAndModes) {
  GridSpec spec{64, 8};
  Grid2Field f = Grid2Field::mode(spec, 3, -2);
  EXPECT_NEAR(std::abs(f.coeff(3, -2) - cplx(1, 0)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(f.value_at(0, 0) - cplx(1, 0)), 0.0, 1e-13);
  EXPECT_LT(f.roundtrip_error(), 1e-12);
  // spectral off-lattice evaluation agrees with the closed form
  cplx v = f.eval(0.2, 0.35);
  cplx want = std::polar(1.0, kTwoPi * (3 * 0.2 - 2 * 0.35));
  EXPECT_NEAR(std::abs(v - want), 0.0, 1e-12);
}

TEST(Grid, ComposeIntPermutes) {
  GridSpec spec{32, 8};
  IMat2 A{2, 1, 1, 1};
  Rng rng(5);
  auto f = Grid2Field::from_function(spec, [&](double, double) {
    return cplx(rng.normal(), 0);
  });
  auto g = f.compose_int(A).compose_int(A.inverse_unimodular());
  double diff = 0;
  for (int i = 0; i < spec.n_side; ++i)
    for (int j = 0; j < spec.n_side; ++j)
      diff = std::max(diff, std::abs(f.value_at(i, j) - g.value_at(i, j)));
  EXPECT_EQ(diff, 0.0);  // bit-exact permutation round trip
}

TEST(Grid, TwistedSliceWrap) {
  GridSpec spec{16, 8};
  IMat2 A{2, 1, 1, 1};
  auto u = MappingTorusField::from_function(
      spec, A, [](double x, double y, double s) {
        return cplx(std::cos(kTwoPi * (x + y)) + s, 0);
      });
  // slice(j + n_s) == slice(j) composed with A
  auto a = u.twisted_slice(3 + spec.n_s);
  auto b = u.slice(3).compose_int(A);
  EXPECT_EQ((a - b).max_abs(), 0.0);
}

TEST(Rng, DeterministicSplit) {
  Rng a(42), b(42);
  EXPECT_EQ(a.split(3).next_u64(), b.split(3).next_u64());
  EXPECT_NE(a.split(3).next_u64(), a.split(4).next_u64());
}

TEST(LinFit, RecoversLine) {
  std::vector<double> xs{0, 1, 2, 3}, ys{1, 3, 5, 7};
  auto f = linear_fit(xs, ys);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.residual_rms, 0.0, 1e-12);
}

}  // namespace
