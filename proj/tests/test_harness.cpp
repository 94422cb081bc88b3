#include <gtest/gtest.h>

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>

#include "eqlab/divergence.hpp"
#include "eqlab/harness.hpp"

namespace {

using namespace eqlab;

double top_term_oracle(double n, double m) { return 0.5 * m * (std::log(n / 2) - boost::math::digamma(n / 2)); }

TEST(Theorem1, ZeroMeanTermsInClosedForm) {
  for (double sigma : {0.5, 1.0, 3.0}) {
    const ModelSpec s = make_model_spec("zero", "constant", 11, 4, 0, {}, sigma);
    const auto b = decompose_theorem1(s);
    EXPECT_EQ(b.id, "theorem1");
    EXPECT_EQ(b.term("wavelet_means").exact, 0.0);
    EXPECT_NEAR(b.term("top_coefficients").exact, top_term_oracle(2048, 16), 1e-15);
    EXPECT_EQ(b.term("variance").method, EvalMethod::ClosedForm);
    EXPECT_NEAR(b.term("variance").exact, kl_gamma_exact({1024, 1.0 / 1024}, {1016, 1.0 / 1016}), 1e-15);
    EXPECT_NEAR(b.tv_surrogate, std::sqrt(b.total), 1e-15);
  }
}

TEST(Theorem1, TopTermBelowJensenBoundUpTo2To20) {
  for (int k = 2; k <= 20; ++k) {
    const double n = std::exp2(k);
    for (double m = 1; m < n; m *= 2) {
      const double t = 0.5 * m * (std::log(n / 2) - boost::math::digamma(n / 2));
      EXPECT_LE(t, m / (n - 2)) << n << ' ' << m;
    }
  }
}

TEST(Theorem1, SineTotalBelowThreeGamma) {
  SweepTemplate tpl;
  const ModelSpec s = sweep_spec(tpl, 12);
  const auto b = decompose_theorem1(s);
  EXPECT_LE(b.total, 3 * s.fixture.cls.gamma(s.k0));
  for (const auto& t : b.terms) EXPECT_TRUE(t.verified()) << t.name;
}

TEST(Theorem1, DyadicBalanceOfTheTwoLeadingTerms) {
  // Away from the k0 = k - 1 clamp the dyadic m balances m/n against
  // (n/m) gamma^2 up to the grid resolution 2^(2 - alpha) per level.
  SweepTemplate tpl;
  tpl.params.amplitude = 0.01;
  for (int k = 8; k <= 16; ++k) {
    const ModelSpec s = sweep_spec(tpl, k);
    ASSERT_LT(s.k0, k - 1);
    const double n = static_cast<double>(s.n());
    const double m = s.m0();
    const double g = s.fixture.cls.gamma(s.k0);
    const double ratio = (m / n) / (n / m * g * g);
    EXPECT_LE(std::abs(std::log2(ratio)), 2 - s.fixture.cls.alpha + 1e-12) << k;
  }
}

TEST(Lemma2, SingleBlockReducesToTheorem1) {
  for (const auto& mean : {"zero", "sine", "polynomial", "piecewise"}) {
    const ModelSpec s = make_model_spec(mean, "constant", 12, 5, 0);
    const auto a = decompose_theorem1(s);
    const auto b = decompose_lemma2(s);
    EXPECT_NEAR(a.total, b.total, 1e-12) << mean;
    for (std::size_t i = 0; i < a.terms.size(); ++i) EXPECT_NEAR(a.terms[i].exact, b.terms[i].exact, 1e-12);
  }
}

TEST(Lemma2, TermsBelowStatedBounds) {
  for (const auto& tau : {"constant", "linear", "quadratic", "smooth"}) {
    for (int k = 10; k <= 16; k += 2) {
      const ModelSpec s = make_model_spec("sine", tau, k, k / 2 + 1, k / 4);
      const auto b = decompose_lemma2(s);
      const auto& cls = s.fixture.cls;
      const double n = static_cast<double>(s.n());
      EXPECT_LE(b.term("top_coefficients").exact, s.m1() * s.m0() / n) << tau;
      const double sbar2 = std::exp(s.fixture.logvar.integral(0, 1));
      const double g = cls.gamma(s.k0);
      EXPECT_LE(b.term("wavelet_means").exact, std::exp(cls.holder_M) * n * std::pow(s.m0(), -2 * cls.alpha) * g * g / sbar2)
          << tau;
      for (const auto& t : b.terms) EXPECT_TRUE(t.verified()) << tau << ' ' << t.name;
      EXPECT_EQ(b.term("variance").per_unit.size(), static_cast<std::size_t>(s.m1()));
    }
  }
}

TEST(Pipeline7, ConstantTauLeavesOnlyMeanTerms) {
  const ModelSpec s = make_model_spec("sine", "constant", 12, 6, 3);
  const auto b = decompose_pipeline7(s);
  for (const char* name : {"top_variance", "split", "recombine_lemma5", "recombine_penalty", "sampling_variance"}) {
    EXPECT_EQ(b.term(name).exact, 0.0) << name;
  }
  EXPECT_GT(b.term("mean_tail").exact, 0.0);
  EXPECT_GT(b.term("sampling_mean").exact, 0.0);
  EXPECT_ANY_THROW((void)decompose_pipeline7(make_model_spec("sine", "constant", 12, 6, 0)));
}

TEST(Pipeline7, QuadraticTauPenaltiesWithinEnvelope) {
  const ModelSpec s = make_model_spec("sine", "quadratic", 12, 6, 3);
  const auto b = decompose_pipeline7(s);
  const auto pen = smoothing_penalty(block_log_variances(s).block, 4096, 64, 8, s.fixture.cls.holder_M,
                                     s.fixture.cls.alpha1);
  const double env = s.fixture.cls.holder_M * s.fixture.cls.holder_M * (4096.0 - 64) / 8 * std::pow(8.0, -2 * s.fixture.cls.alpha1);
  for (const auto& p : pen) {
    if (p.interior) {
      EXPECT_LE(p.exact, env) << p.block;
      EXPECT_NEAR(p.envelope, env, 1e-15);
    }
  }
  EXPECT_EQ(b.term("recombine_penalty").per_unit.size(), 8u);
  EXPECT_TRUE(b.term("recombine_penalty").signed_value);
}

TEST(Pipeline7, LinearTauTopVarianceWithinMOverM1) {
  const ModelSpec s = make_model_spec("zero", "linear", 14, 7, 4);
  const auto& top = decompose_pipeline7(s).term("top_variance");
  const double M = s.fixture.cls.holder_M;
  EXPECT_LE(top.exact, top.bound);
  EXPECT_LE(top.bound, top.bound_alt * (1 + 1e-12));
  EXPECT_LE(top.bound, 128 * M * M / (16.0 * 16.0) + 1e-15);
}

class ExactnessOrdering : public ::testing::TestWithParam<std::tuple<std::string, std::string>> {};

TEST_P(ExactnessOrdering, EveryTermBelowItsBound) {
  const auto& [mean, tau] = GetParam();
  for (int k = 8; k <= 16; ++k) {
    for (SweepMode mode : {SweepMode::Theorem1, SweepMode::Lemma2, SweepMode::Pipeline7}) {
      SweepTemplate tpl;
      tpl.mean_name = mean;
      tpl.logvar_name = tau;
      tpl.mode = mode;
      const ModelSpec s = sweep_spec(tpl, k);
      DivergenceBreakdown b;
      switch (mode) {
        case SweepMode::Theorem1: b = decompose_theorem1(s); break;
        case SweepMode::Lemma2: b = decompose_lemma2(s); break;
        case SweepMode::Pipeline7: b = decompose_pipeline7(s); break;
      }
      for (const auto& t : b.terms) {
        EXPECT_TRUE(t.verified()) << mean << '/' << tau << " k=" << k << ' ' << b.id << ':' << t.name << " exact "
                                  << t.exact << " bound " << t.bound;
        if (!t.signed_value) {
          EXPECT_GE(t.exact, 0.0) << t.name;
        }
      }
      double sum = 0.0;
      for (const auto& t : b.terms) sum += t.exact;
      EXPECT_NEAR(b.total, sum, 1e-12 * std::max(1.0, sum));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllFixtures, ExactnessOrdering,
                         ::testing::Combine(::testing::Values("zero", "sine", "polynomial", "piecewise"),
                                            ::testing::Values("constant", "linear", "quadratic", "smooth")));

TEST(Feasibility, Verdicts) {
  const auto low = check_feasibility(0.7, 2.0);
  EXPECT_FALSE(low.feasible);
  EXPECT_FALSE(low.alpha_ok);
  const auto good = check_feasibility(1.0, 2.0);
  ASSERT_TRUE(good.feasible);
  EXPECT_TRUE(exponent_conditions_hold(1.0, 2.0, good.zeta0, good.zeta1));
  EXPECT_DOUBLE_EQ(good.zeta0, 0.5);
  EXPECT_TRUE(exponent_conditions_hold(1.0, 2.0, 0.5, 0.3));
  const auto ex = check_feasibility(0.8, 1.3);
  EXPECT_FALSE(ex.feasible);
  EXPECT_TRUE(ex.alpha_ok);
  EXPECT_FALSE(ex.alpha1_ok);
  EXPECT_NEAR(ex.epsilon, 0.25 * (0.75 - 1 / 1.3), 1e-15);
  EXPECT_LT(ex.epsilon, 0.0);
  EXPECT_FALSE(check_feasibility(0.75, 10.0).feasible);
  EXPECT_FALSE(check_feasibility(1.01, 10.0).feasible);
}

TEST(Feasibility, JustAboveThreeQuarters) {
  // The smoothness threshold alpha / (2 alpha - 1) tends to 3/2 and the
  // exponent window 1 - 1/(2 alpha) - max(...) shrinks but stays open.
  for (double a : {0.7501, 0.76, 0.8}) {
    const double thr = a / (2 * a - 1);
    EXPECT_FALSE(check_feasibility(a, thr).feasible) << a;
    const auto f = check_feasibility(a, thr + 0.01);
    EXPECT_TRUE(f.feasible) << a;
    EXPECT_GT(f.epsilon, 0.0);
    EXPECT_TRUE(exponent_conditions_hold(a, thr + 0.01, f.zeta0, f.zeta1));
  }
}

TEST(Bounds, ValuesFollowTheirFormulas) {
  FixtureParams p;
  p.alpha = 0.9;
  const ModelSpec s = make_model_spec("sine", "linear", 14, 8, 3, p);
  const auto b = evaluate_bounds(s);
  const auto& c = s.fixture.cls;
  const double n = 16384;
  const double m0 = 256;
  const double m1 = 8;
  const double g = c.gamma(8);
  EXPECT_DOUBLE_EQ(b.lemma1, 2 * std::sqrt(g));
  EXPECT_DOUBLE_EQ(b.headline, 2 * std::sqrt(c.gamma_scale) * g);
  const double tail = std::exp(c.holder_M / 2) * std::pow(m0, -0.9) * std::sqrt(n) * g;
  EXPECT_NEAR(b.lemma2_statement, 2 * std::sqrt(m1 * m0 / n) + tail, 1e-12);
  EXPECT_NEAR(b.lemma2_statement - b.lemma2_derived, (2 - std::sqrt(2.0)) * std::sqrt(m1 * m0 / n), 1e-12);
  EXPECT_NEAR(b.lemma4, m1 / std::sqrt(n) + 2 * c.holder_M * std::sqrt(n) * std::pow(m1, -c.alpha1) +
                            c.holder_M * std::sqrt(n) * std::pow(m1, -1.5),
              1e-12);
  EXPECT_NEAR(b.zeta0, 8.0 / 14.0, 1e-15);
  EXPECT_NEAR(b.zeta1, 3.0 / 14.0, 1e-15);
  EXPECT_NEAR(b.recommended_m0, std::pow(n, 1 / 1.8), 1e-9);
  const double e = 0.1;
  EXPECT_NEAR(b.lemma1_power, 2 * std::sqrt(c.gamma_scale) * std::pow(n, -e / (2 * (1 + e))), 1e-12);
}

TEST(Sweep, ZeroMeanTotalDecreases) {
  SweepTemplate tpl;
  tpl.mean_name = "zero";
  const auto rep = rate_sweep(tpl, {8, 9, 10, 11, 12, 13, 14, 15, 16}, {});
  for (std::size_t i = 1; i < rep.rows.size(); ++i) EXPECT_LT(rep.rows[i].kl_total, rep.rows[i - 1].kl_total);
}

TEST(Sweep, SurrogateDecreasesForEveryFixture) {
  for (const auto& mean : {"zero", "sine", "polynomial", "piecewise"}) {
    SweepTemplate tpl;
    tpl.mean_name = mean;
    const auto rep = rate_sweep(tpl, {8, 9, 10, 11, 12, 13, 14, 15, 16}, {});
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
      EXPECT_LT(rep.rows[i].tv_surrogate, rep.rows[i - 1].tv_surrogate) << mean << ' ' << i;
      EXPECT_LE(rep.rows[i].kl_total, rep.rows[i].kl_bound) << mean;
    }
  }
}

TEST(Sweep, SlopeTracksThreeGammaAwayFromTheClamp) {
  SweepTemplate tpl;
  tpl.params.amplitude = 0.01;
  std::vector<int> ks;
  for (int k = 8; k <= 16; ++k) ks.push_back(k);
  const auto rep = rate_sweep(tpl, ks, {});
  std::vector<double> n;
  std::vector<double> kl;
  std::vector<double> g3;
  for (const auto& r : rep.rows) {
    n.push_back(static_cast<double>(r.n));
    kl.push_back(r.kl_total);
    g3.push_back(3 * sweep_spec(tpl, static_cast<int>(std::lround(std::log2(static_cast<double>(r.n))))).fixture.cls.gamma(r.k0));
  }
  const auto a = fit_loglog_slope(n, kl);
  const auto b = fit_loglog_slope(n, g3);
  EXPECT_LE(std::abs(a.slope - b.slope), 2 * std::hypot(a.se, b.se)) << a.slope << " vs " << b.slope;
  EXPECT_NEAR(rep.slope, 0.5 * a.slope, 1e-12);
}

TEST(Sweep, GuardsAndDeterminism) {
  SweepTemplate tpl;
  EXPECT_ANY_THROW((void)rate_sweep(tpl, {21}, {}));
  EXPECT_ANY_THROW((void)rate_sweep(tpl, {10, 9}, {}));
  SweepOptions one;
  one.replicates = 24;
  one.seed = 3;
  SweepOptions three = one;
  three.threads = 3;
  const auto a = rate_sweep(tpl, {8, 9}, one);
  const auto b = rate_sweep(tpl, {8, 9}, three);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].auc.auc, b.rows[i].auc.auc);
    EXPECT_EQ(a.rows[i].min_ks_p, b.rows[i].min_ks_p);
  }
}

TEST(Sweep, LogLogFit) {
  const auto f = fit_loglog_slope({1, 2, 4, 8}, {3, 1.5, 0.75, 0.375});
  EXPECT_NEAR(f.slope, -1.0, 1e-14);
  EXPECT_NEAR(f.se, 0.0, 1e-12);
  EXPECT_ANY_THROW((void)fit_loglog_slope({1}, {1}));
}

}  // namespace
