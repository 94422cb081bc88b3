#include <gtest/gtest.h>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>

#include "eqlab/samplers.hpp"
#include "eqlab/special.hpp"
#include "eqlab/two_sample.hpp"

namespace {

using namespace eqlab;
namespace bm = boost::math;

constexpr double kKsLevel = 1e-3;

TEST(Samplers, GammaMarginalsPassKs) {
  for (double shape : {0.05, 0.7, 1.0, 3.5, 250.0}) {
    RngStream rng(21, static_cast<std::uint64_t>(shape * 100));
    std::vector<double> x(20000);
    for (auto& v : x) v = draw_gamma(shape, 2.0, rng);
    const bm::gamma_distribution<double> g(shape, 2.0);
    const auto ks = ks_one_sample(x, [&](double t) { return t <= 0 ? 0.0 : bm::cdf(g, t); });
    EXPECT_GT(ks.p_value, kKsLevel) << shape;
  }
}

TEST(Samplers, LogGammaFiniteForTinyShapes) {
  RngStream rng(3, 0);
  double mean = 0.0;
  constexpr int N = 40000;
  for (int i = 0; i < N; ++i) {
    const double v = draw_log_gamma(1e-3, rng);
    ASSERT_TRUE(std::isfinite(v));
    mean += v / N;
  }
  // E log G = psi(a); sd of log G ~ 1/a here, so the check is loose.
  EXPECT_NEAR(mean, digamma(1e-3), 5.0 * std::sqrt(trigamma(1e-3) / N));
}

TEST(Samplers, DirichletSumsToOneWithBetaMarginals) {
  RngStream rng(5, 0);
  const std::vector<double> alphas{0.5, 2.0, 7.5};
  const double total = 10.0;
  std::vector<double> first;
  for (int i = 0; i < 20000; ++i) {
    const auto x = draw_dirichlet(alphas, rng);
    ASSERT_NEAR(std::accumulate(x.begin(), x.end(), 0.0), 1.0, 1e-14);
    first.push_back(x[0]);
  }
  const bm::beta_distribution<double> b(0.5, total - 0.5);
  EXPECT_GT(ks_one_sample(first, [&](double t) { return bm::cdf(b, std::clamp(t, 0.0, 1.0)); }).p_value, kKsLevel);
}

TEST(Samplers, NoncentralChiSquarePassesKs) {
  RngStream rng(9, 0);
  for (double lambda : {0.0, 3.0, 40.0}) {
    std::vector<double> x(20000);
    for (auto& v : x) v = draw_noncentral_chisq(12.0, lambda, rng);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    EXPECT_NEAR(mean, 12.0 + lambda, 5.0 * std::sqrt(2.0 * (12.0 + 2.0 * lambda) / x.size()));
    if (lambda > 0.0) {
      const bm::non_central_chi_squared_distribution<double> d(12.0, lambda);
      EXPECT_GT(ks_one_sample(x, [&](double t) { return t <= 0 ? 0.0 : bm::cdf(d, t); }).p_value, kKsLevel);
    }
  }
}

TEST(Samplers, ConditionalGaussiansLieOnTheSphere) {
  RngStream rng(17, 0);
  std::vector<double> u;
  for (int rep = 0; rep < 4000; ++rep) {
    const auto x = draw_conditional_gaussians(5.0, 40, 2.0, rng);
    double ss = 0.0;
    for (double v : x) ss += v * v;
    ASSERT_NEAR(2.0 * ss, 5.0, 1e-12);
    for (int i = 0; i < 5; ++i) u.push_back(2.0 * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)] / 5.0);
  }
  // One squared coordinate over the total is Beta(1/2, (count - 1)/2).
  const bm::beta_distribution<double> b(0.5, 19.5);
  EXPECT_GT(ks_one_sample(u, [&](double t) { return bm::cdf(b, std::clamp(t, 0.0, 1.0)); }).p_value, kKsLevel);
}

TEST(Samplers, KernelHasUnitMassAndFoldsAtEdges) {
  // The folded edge kernel is flat at m1 on [0, 1/(2 m1)].
  EXPECT_NEAR(kernel_value(1, 4, 0.0), 4.0, 1e-12);
  EXPECT_NEAR(kernel_value(1, 4, 0.1), 4.0, 1e-12);
  for (int m1 : {2, 8, 32}) {
    for (int l = 1; l <= m1; ++l) {
      EXPECT_NEAR(kernel_mass(l, m1, 0.0, 1.0), 1.0, 1e-13);
      EXPECT_NEAR(kernel_value(l, m1, (2.0 * l - 1.0) / (2.0 * m1)), m1, 1e-9 * m1);
      double riemann = 0.0;
      constexpr int G = 1 << 14;
      for (int g = 0; g < G; ++g) riemann += kernel_value(l, m1, (g + 0.5) / G) / G;
      EXPECT_NEAR(riemann, 1.0, 1e-4);
    }
  }
}

TEST(Samplers, BridgeIncrementsSumToZero) {
  RngStream rng(2, 0);
  for (int l : {1, 3, 8}) {
    const auto b = draw_bridge_process(l, 8, 1024, rng);
    EXPECT_NEAR(std::accumulate(b.kernel_masses.begin(), b.kernel_masses.end(), 0.0), 1.0, 1e-13);
    EXPECT_NEAR(std::accumulate(b.increments.begin(), b.increments.end(), 0.0), 0.0, 1e-12);
  }
  EXPECT_ANY_THROW((void)draw_bridge_process(1, 8, 100, rng));
}

TEST(Samplers, StreamsAreReproducibleAndSplitIndependent) {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  const RngStream parent(42, 7);
  RngStream c1 = parent.split(3);
  (void)a.normal();
  RngStream c2 = a.split(3);
  EXPECT_EQ(c1.next_u64(), c2.next_u64());
  EXPECT_NE(parent.split(3).next_u64(), parent.split(4).next_u64());
}

}  // namespace
