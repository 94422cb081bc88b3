#include <gtest/gtest.h>

#include <cmath>

#include "eqlab/fixtures.hpp"
#include "eqlab/wavelet.hpp"

namespace {

using namespace eqlab;

TEST(Fixtures, EveryPairCertifies) {
  for (const auto& m : mean_fixture_names()) {
    for (const auto& t : logvar_fixture_names()) {
      const Fixture fx = make_fixture(m, t);
      EXPECT_NO_THROW(fx.cls.validate()) << m << '/' << t;
    }
  }
  EXPECT_ANY_THROW((void)make_fixture("nope", "constant"));
  EXPECT_ANY_THROW((void)make_fixture("zero", "nope"));
}

TEST(Fixtures, ExactLadderMatchesCascadeOfCellAverages) {
  constexpr int K = 10;
  const double n = std::exp2(K);
  for (const auto& m : mean_fixture_names()) {
    const MeanFixture f = make_mean_fixture(m);
    std::vector<double> avg(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < avg.size(); ++c) avg[c] = n * f.integral(c / n, (c + 1) / n);
    const auto cascade = haar_analyze(avg, 2);
    const auto exact = fixture_ladder(f, 2, K);
    const double s = 1.0 / std::sqrt(n);
    for (std::size_t j = 0; j < exact.scaling.size(); ++j) EXPECT_NEAR(exact.scaling[j], s * cascade.scaling[j], 1e-13) << m;
    for (int i = 2; i < K; ++i) {
      for (std::size_t j = 0; j < exact.level(i).size(); ++j) {
        EXPECT_NEAR(exact.level(i)[j], s * cascade.level(i)[j], 1e-13) << m << ' ' << i;
      }
    }
  }
}

TEST(Fixtures, BesovTailsDominatedByGamma) {
  for (const auto& m : mean_fixture_names()) {
    const Fixture fx = make_fixture(m, "constant");
    for (int k = 0; k <= 20; ++k) {
      for (BesovNorm mode : {BesovNorm::L2, BesovNorm::SupL1}) {
        EXPECT_LE(fixture_besov_tail(fx.mean, fx.cls.alpha, mode, k), fx.cls.gamma(k) * (1 + 1e-12)) << m << ' ' << k;
      }
    }
  }
}

TEST(Fixtures, TailEnergyAgreesWithLevelSums) {
  for (const auto& m : mean_fixture_names()) {
    const MeanFixture f = make_mean_fixture(m);
    const auto stats = fixture_level_stats(f, 16);
    for (int k0 : {2, 5, 9}) {
      double direct = 0.0;
      for (int i = k0; i < 16; ++i) direct += stats[static_cast<std::size_t>(i)].sum_sq;
      const double total = fixture_tail_energy(f, k0);
      // Levels 16 and deeper hold at most L^2 2^-32 / 12 for the smooth fixtures.
      EXPECT_NEAR(total, direct, 1e-9 * std::max(1.0, total)) << m << ' ' << k0;
      double blocks = 0.0;
      for (int b = 0; b < 4; ++b) blocks += fixture_tail_energy(f, k0, b / 4.0, (b + 1) / 4.0);
      EXPECT_NEAR(blocks, total, 1e-13) << m;
    }
  }
}

TEST(Fixtures, LogVarianceHolderConditions) {
  for (const auto& t : logvar_fixture_names()) {
    const LogVarFixture tau = make_logvar_fixture(t);
    const auto check = check_holder(tau, tau.holder_M, tau.alpha1);
    EXPECT_TRUE(check.holds) << t;
    EXPECT_LE(check.max_derivative, tau.holder_M * (1 + 1e-12)) << t;
    // The primitive integrates the value.
    const double mid = 0.5 * (tau.value(0.25) + tau.value(0.75));
    EXPECT_NEAR(tau.integral(0.25, 0.75), 0.5 * mid, 0.1) << t;
  }
}

// Sampled values against the fine scaling coefficients: the sum of squared
// gaps over 2 sigma^2 stays below gamma_k^2 / 4.
TEST(Fixtures, SampledMeanMismatchBelowQuarterGammaSquared) {
  for (const auto& m : mean_fixture_names()) {
    const Fixture fx = make_fixture(m, "constant");
    for (int k = 4; k <= 16; ++k) {
      const double n = std::exp2(k);
      double sum = 0.0;
      for (int l = 1; l <= static_cast<int>(n); ++l) {
        const double gap = n * fx.mean.integral((l - 1) / n, l / n) - fx.mean.value(l / n);
        sum += gap * gap / 2.0;
      }
      const double g = fx.cls.gamma(k);
      EXPECT_LE(sum, 0.25 * g * g) << m << " k=" << k;
    }
  }
}

}  // namespace
