#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "eqlab/experiments.hpp"
#include "eqlab/two_sample.hpp"

namespace eqlab {

// Slack applied to bounds whose displayed form drops unquantified
// higher-order remainders.
inline constexpr double kBoundSlack = 1.5;

enum class EvalMethod { ClosedForm, Quadrature, Joint, MonteCarlo };
[[nodiscard]] std::string_view method_name(EvalMethod m);

struct TermValue {
  std::string name;
  double exact = 0.0;
  double bound = 0.0;  // sum of the per-unit bounds
  // Aggregate or alternative displayed bound; NaN when there is none.
  double bound_alt = std::numeric_limits<double>::quiet_NaN();
  EvalMethod method = EvalMethod::ClosedForm;
  double slack = 1.0;
  bool signed_value = false;  // may legitimately be negative
  std::vector<double> per_unit;  // per block or per cell contributions
  [[nodiscard]] bool verified() const { return exact <= slack * bound; }
};

struct DivergenceBreakdown {
  std::string id;
  std::vector<TermValue> terms;
  double total = 0.0;
  double total_bound = 0.0;
  double tv_surrogate = 0.0;  // sqrt(total)

  [[nodiscard]] const TermValue& term(std::string_view name) const;
  // Kahan-summed totals and the surrogate.
  void finalize();
};

// Constant-variance chain: D(V, V-hat), top coefficients, wavelet means.
// Uses m = 2^k0 and spec.sigma; n must exceed 2.
[[nodiscard]] DivergenceBreakdown decompose_theorem1(const ModelSpec& spec);
// Blocked chain with m1 blocks; needs n > 2 m1.
[[nodiscard]] DivergenceBreakdown decompose_lemma2(const ModelSpec& spec);
// Variance redistribution chain from the blocked sequence experiment to the
// heteroscedastic regression.
[[nodiscard]] DivergenceBreakdown decompose_pipeline7(const ModelSpec& spec);

struct Feasibility {
  bool feasible = false;
  bool alpha_ok = false;   // 3/4 < alpha <= 1
  bool alpha1_ok = false;  // alpha1 > max(1, alpha / (2 alpha - 1))
  double alpha1_threshold = 0.0;
  double epsilon = 0.0;  // (1/4)((2 alpha - 1)/alpha - 1/alpha1)
  double zeta0 = 0.0;    // satisfying exponents, when feasible
  double zeta1 = 0.0;
  std::string reason;
};

[[nodiscard]] Feasibility check_feasibility(double alpha, double alpha1);

// Do the exponent conditions hold for the given exponents?
[[nodiscard]] bool exponent_conditions_hold(double alpha, double alpha1, double zeta0, double zeta1);

struct BoundsReport {
  double n = 0.0;
  double m0 = 0.0;
  double m1 = 0.0;
  double gamma_k0 = 0.0;
  double lemma1 = 0.0;           // 2 gamma^(1/2)
  double lemma1_power = 0.0;     // 2 C^(1/2) n^(-e / (2 (1 + e))), gamma_k = C 2^(-e k)
  double headline = 0.0;         // 2 C^(1/2) gamma
  double lemma2_statement = 0.0;  // 2 (m1 m0 / n)^(1/2) + e^(M/2) m0^-a n^(1/2) gamma
  double lemma2_derived = 0.0;    // square roots of the divergence bound terms
  double lemma3 = 0.0;            // the five displayed terms times 2 e^(M/2)
  double lemma4 = 0.0;
  double zeta0 = 0.0;  // log_n m0 of the spec
  double zeta1 = 0.0;
  bool spec_exponents_ok = false;
  Feasibility feasibility;
  double recommended_m0 = 0.0;  // n^(1/(2 alpha))
  double recommended_m1 = 0.0;  // n^(1/(2 alpha1) + epsilon)
};

[[nodiscard]] BoundsReport evaluate_bounds(const ModelSpec& spec);

enum class SweepMode { Theorem1, Lemma2, Pipeline7 };
[[nodiscard]] std::string_view sweep_mode_name(SweepMode m);
[[nodiscard]] SweepMode parse_sweep_mode(std::string_view s);

struct SweepTemplate {
  std::string mean_name = "sine";
  std::string logvar_name = "constant";
  FixtureParams params;
  double sigma = 1.0;
  SweepMode mode = SweepMode::Theorem1;
};

inline AucResult no_auc() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {nan, nan, nan, nan};
}

struct SweepRow {
  std::size_t n = 0;
  int k0 = 0;
  int k1 = 0;
  double m = 0.0;
  double m0 = 0.0;
  double m1 = 0.0;
  double zeta0 = 0.0;
  double zeta1 = 0.0;
  double bound = 0.0;     // deficiency bound for the mode
  double kl_bound = 0.0;  // m^2/n^2 + m/n + (n/m) gamma^2 for the first mode, else the term-bound sum
  double kl_total = 0.0;
  double tv_surrogate = 0.0;
  AucResult auc = no_auc();  // NaN unless replicates were drawn
  double min_ks_p = std::numeric_limits<double>::quiet_NaN();
  bool marginals_pass = true;
  double slope_partial = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double slope = 0.0;  // log-log slope of the surrogate against n
  double slope_se = 0.0;
  double bound_slope = 0.0;  // same for the bound column
  double bound_slope_se = 0.0;
};

struct SweepOptions {
  int replicates = 0;  // Monte-Carlo draws per n and sample; 0 skips
  unsigned threads = 1;
  std::uint64_t seed = 1;
};

// Least-squares slope and its standard error.
struct SlopeFit {
  double slope = 0.0;
  double se = 0.0;
};
[[nodiscard]] SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Levels chosen per n: first mode via choose_coarse_level, blocked modes from
// the recommended exponents rounded to dyadic sizes.
[[nodiscard]] ModelSpec sweep_spec(const SweepTemplate& tpl, int k);

// `ks` ascending, each at most 20.
[[nodiscard]] SweepReport rate_sweep(const SweepTemplate& tpl, const std::vector<int>& ks,
                                     const SweepOptions& opt);

}  // namespace eqlab
