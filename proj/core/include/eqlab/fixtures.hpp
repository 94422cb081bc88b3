#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eqlab/wavelet.hpp"

namespace eqlab {

// Smoothness class of a (mean, log-variance) pair. gamma(k) is
// gamma_scale * 2^(k (alpha - alpha_star)).
struct ClassSpec {
  double alpha = 0.75;
  double alpha1 = 2.0;
  double holder_M = 1.0;
  double gamma_scale = 1.0;
  double alpha_star = 1.0;

  [[nodiscard]] double gamma(int k) const;
  void validate() const;
};

struct MeanFixture {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> primitive;         // antiderivative of f
  std::function<double(double)> square_primitive;  // antiderivative of f^2
  double lipschitz = 0.0;
  // Wavelet coefficients vanish from this level on (piecewise-constant
  // fixtures); -1 when they never do.
  int vanishing_level = -1;

  [[nodiscard]] double integral(double a, double b) const { return primitive(b) - primitive(a); }
  [[nodiscard]] double square_integral(double a, double b) const {
    return square_primitive(b) - square_primitive(a);
  }
};

struct LogVarFixture {
  std::string name;
  std::function<double(double)> value;       // tau(t) = log sigma^2(t)
  std::function<double(double)> derivative;  // tau'(t)
  std::function<double(double)> primitive;   // antiderivative of tau
  double holder_M = 1.0;
  double alpha1 = 2.0;
  bool constant = false;

  [[nodiscard]] double integral(double a, double b) const { return primitive(b) - primitive(a); }
};

struct FixtureParams {
  double alpha = 0.75;       // mean smoothness used for the gamma certificate
  double amplitude = 1.0;    // sine / polynomial scale
  double tau_level = 0.0;    // constant tau value, linear intercept
  double tau_slope = 0.5;    // linear tau slope
  double tau_curvature = 1.0;  // quadratic tau = c t^2
  double tau_amplitude = 0.1;  // smooth tau = a sin(2 pi t)
  double holder_M = 1.0;     // used for constant tau (any M > 0 holds)
  double alpha1 = 2.0;
};

struct Fixture {
  MeanFixture mean;
  LogVarFixture logvar;
  ClassSpec cls;
};

[[nodiscard]] std::vector<std::string> mean_fixture_names();
[[nodiscard]] std::vector<std::string> logvar_fixture_names();

[[nodiscard]] MeanFixture make_mean_fixture(const std::string& name, const FixtureParams& p = {});
[[nodiscard]] LogVarFixture make_logvar_fixture(const std::string& name,
                                                const FixtureParams& p = {});

// Pair plus a certified class: gamma_k dominates both Besov tails of the
// mean at every level, and tau satisfies the Holder condition with
// (holder_M, alpha1).
[[nodiscard]] Fixture make_fixture(const std::string& mean_name, const std::string& logvar_name,
                                   const FixtureParams& p = {});

// Exact Haar coefficients of the fixture for levels [k0, k).
[[nodiscard]] HaarLadder fixture_ladder(const MeanFixture& f, int coarse_level, int fine_level);

// Level sums up to `max_level` (exclusive) from exact cell integrals.
[[nodiscard]] std::vector<LevelStats> fixture_level_stats(const MeanFixture& f, int max_level);

// Besov tail from exact coefficients up to level 20 plus the Lipschitz
// remainder bound for deeper levels.
[[nodiscard]] double fixture_besov_tail(const MeanFixture& f, double alpha, BesovNorm mode,
                                        int from_level);

// sum_{i >= k0} sum_j theta_ij^2, by Parseval from the scaling coefficients.
[[nodiscard]] double fixture_tail_energy(const MeanFixture& f, int coarse_level);
// Same restricted to wavelets supported in [a, b] (a, b on the 2^-k0 grid).
[[nodiscard]] double fixture_tail_energy(const MeanFixture& f, int coarse_level, double a,
                                         double b);

// Grid evaluation at the design points i / n, i = 1..n.
[[nodiscard]] std::vector<double> evaluate_on_design(const std::function<double(double)>& g,
                                                     std::size_t n);

struct HolderCheck {
  double max_derivative = 0.0;
  double max_holder_ratio = 0.0;
  bool holds = false;
};

// sup |tau'| <= M and |tau'(t) - tau'(s)| <= M |t - s|^(alpha1 - 1), checked
// on all pairs of a uniform grid with `points` nodes.
[[nodiscard]] HolderCheck check_holder(const LogVarFixture& tau, double M, double alpha1,
                                       int points = 257);

}  // namespace eqlab
