#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "eqlab/rng.hpp"
#include "eqlab/wavelet.hpp"

namespace {

using namespace eqlab;

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> y(n);
  for (auto& v : y) v = rng.normal();
  return y;
}

double sum_sq(const std::vector<double>& v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); }

TEST(Haar, RoundTripAndParsevalUpTo2To16) {
  for (int k = 1; k <= 16; ++k) {
    const std::size_t n = std::size_t{1} << k;
    const auto y = noise(n, static_cast<std::uint64_t>(k));
    for (int k0 : {0, k / 2, k}) {
      const auto l = haar_analyze(y, k0);
      EXPECT_EQ(l.size(), n);
      const auto back = haar_synthesize(l);
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(back[i] - y[i]));
      EXPECT_LE(err, 1e-12) << k << ' ' << k0;
      double energy = sum_sq(l.scaling);
      for (const auto& lv : l.wavelets) energy += sum_sq(lv);
      EXPECT_NEAR(energy, sum_sq(y), 1e-12 * sum_sq(y)) << k;
    }
  }
}

TEST(Haar, SignConventionLeftHalfPositive) {
  // Step up in the right half: the top wavelet is negative.
  std::vector<double> y{0.0, 0.0, 1.0, 1.0};
  const auto l = haar_analyze(y, 0);
  EXPECT_NEAR(l.scaling[0], 1.0, 1e-15);
  EXPECT_NEAR(l.level(0)[0], -1.0, 1e-15);
  EXPECT_NEAR(l.level(1)[0], 0.0, 1e-15);
}

TEST(Haar, ConstantSignalHasNoWavelets) {
  const std::vector<double> y(64, 3.0);
  const auto l = haar_analyze(y, 2);
  for (double s : l.scaling) EXPECT_NEAR(s, 3.0 * 4.0, 1e-12);  // sqrt(64 / 4) * 3
  for (const auto& lv : l.wavelets)
    for (double w : lv) EXPECT_EQ(w, 0.0);
}

TEST(Haar, FlattenAndRebuild) {
  const auto y = noise(128, 3);
  const auto l = haar_analyze(y, 3);
  const auto flat = l.flatten_wavelets();
  EXPECT_EQ(flat.size(), 128u - 8u);
  const auto r = ladder_from_flat(3, 7, l.scaling, flat);
  EXPECT_EQ(r.wavelets, l.wavelets);
  EXPECT_ANY_THROW((void)ladder_from_flat(3, 7, l.scaling, std::vector<double>(5)));
}

TEST(Haar, RejectsNonDyadicAndBadLevels) {
  EXPECT_ANY_THROW((void)haar_analyze(std::vector<double>(12, 0.0), 0));
  EXPECT_ANY_THROW((void)haar_analyze(std::vector<double>(16, 0.0), 5));
  EXPECT_TRUE(is_dyadic(1024));
  EXPECT_FALSE(is_dyadic(0));
  EXPECT_FALSE(is_dyadic(96));
  EXPECT_EQ(dyadic_log2(4096), 12);
}

TEST(Besov, TailsOfSingleLevel) {
  HaarLadder l = make_zero_ladder(0, 4);
  l.level(2) = {0.5, -1.0, 0.0, 0.25};
  const double ss = 0.25 + 1.0 + 0.0625;
  EXPECT_NEAR(besov_tail(l, 0.75, BesovNorm::L2, 0), std::sqrt(std::pow(2.0, 2 * 0.75 * 2) * ss), 1e-14);
  EXPECT_NEAR(besov_tail(l, 0.75, BesovNorm::SupL1, 0), std::pow(2.0, 2 * 1.25) * 1.0, 1e-14);
  EXPECT_EQ(besov_tail(l, 0.75, BesovNorm::L2, 3), 0.0);
  EXPECT_EQ(parse_besov_norm("2,2"), BesovNorm::L2);
  EXPECT_EQ(parse_besov_norm("inf,1"), BesovNorm::SupL1);
  EXPECT_ANY_THROW((void)parse_besov_norm("1,1"));
}

}  // namespace
