#pragma once

#include <functional>
#include <vector>

#include "eqlab/quadrature.hpp"

namespace eqlab {

struct GammaParams {
  double shape = 1.0;
  double scale = 1.0;
  void validate() const;
};

struct NormalParams {
  double mean = 0.0;
  double variance = 1.0;
  void validate() const;
};

// All KL values below are D(p || q) = E_p log(p / q).
[[nodiscard]] double kl_normal(const NormalParams& p, const NormalParams& q);
[[nodiscard]] double kl_gamma_exact(const GammaParams& p, const GammaParams& q);
// Equal-mean specialisation (scale ratio fixed by the shapes).
[[nodiscard]] double kl_gamma_equal_mean(double alpha1, double alpha2);
[[nodiscard]] double gamma_same_mean_leading(double alpha1, double alpha2);

// Leading terms of the bound for Gamma(alpha1) against the equal-base-mean
// mixture over Lambda ~ Poisson(lam) of Gamma(alpha2 + Lambda).
[[nodiscard]] double gamma_noncentral_kl_bound(double alpha1, double alpha2, double lam);

// Quadrature value of D(Gamma(a1, s1) || sum_k Pois(k; lam) Gamma(a2 + k, s2)).
// Mixture truncated where the Poisson tail mass drops below 1e-12.
[[nodiscard]] QuadratureResult kl_gamma_vs_poisson_mixture(const GammaParams& p,
                                                           const GammaParams& base, double lam);

struct KlCheck {
  double exact = 0.0;
  double bound = 0.0;
  double oracle = 0.0;
  double oracle_error = 0.0;
};

// D(N(log a, 1/a) || log Gamma(a, 1)): closed form, 1/(3a) bound, quadrature.
[[nodiscard]] KlCheck kl_loggamma_vs_normal(double alpha);

// Independent quadrature oracles for the closed forms.
[[nodiscard]] QuadratureResult kl_normal_quadrature(const NormalParams& p, const NormalParams& q);
[[nodiscard]] QuadratureResult kl_gamma_quadrature(const GammaParams& p, const GammaParams& q);

// Adaptive quadrature of int p log(p/q) over [a, b] from log-densities.
// Throws on support mismatch (q vanishing where p does not) and on
// non-finite results.
[[nodiscard]] QuadratureResult kl_quadrature(const std::function<double(double)>& log_p,
                                             const std::function<double(double)>& log_q, double a,
                                             double b, const QuadratureOptions& opt = {});

// Sum of independent X_i ~ Gamma(delta_i n, sigma_i^2 / n) against
// Gamma(n, sigma_bar^2 / n) with log sigma_bar^2 = sum delta_i log sigma_i^2.
struct GammaSumSpec {
  std::vector<double> weights;     // delta_i, positive, summing to one
  std::vector<double> log_scales;  // log sigma_i^2
  double n = 1.0;
  void validate() const;
  [[nodiscard]] double log_sigma_bar2() const;
  [[nodiscard]] std::vector<double> residuals() const;  // r_i
};

struct GammaSumResult {
  double numeric = 0.0;      // grid-convolution value of D(sum || target)
  double joint = 0.0;        // sum_i D(X_i || X_i*), X_i* ~ Gamma(delta_i (1 + r_i) n, .)
  double paper_bound = 0.0;  // sum_i n delta_i r_i^4 / 8 + r_i^2 / 4
};

// grid_points: cells on [0, mean + 12 sd]; 0 skips the convolution.
[[nodiscard]] GammaSumResult kl_gamma_sum(const GammaSumSpec& spec, int grid_points = 1 << 16);
// Closed-form joint value only.
[[nodiscard]] double kl_gamma_sum_joint(const GammaSumSpec& spec);
[[nodiscard]] double kl_gamma_sum_bound(const GammaSumSpec& spec);

struct RemainderExpansion {
  double exact = 0.0;      // log Gamma(a + d) - log Gamma(a) - d psi(a)
  double expansion = 0.0;  // d^2/2 (1/a + 1/(2a^2)) - d^3/(6a^2) + d^4/(12a^3)
};
[[nodiscard]] RemainderExpansion loggamma_taylor_remainder(double alpha, double delta);

struct SmoothingPenalty {
  int block = 0;
  bool interior = false;
  double exact = 0.0;         // S_l by direct summation over J_l
  double bound = 0.0;         // 3 (n - m0) / (128 m1) (r_{l-1} - r_l)^2
  double envelope = 0.0;      // M^2 (n - m0) / m1 * m1^(-2 alpha1), or m1^-2 at the edges
};

// block_logs are log sigma_l^2 for l = 1..m1.
[[nodiscard]] std::vector<SmoothingPenalty> smoothing_penalty(const std::vector<double>& block_logs,
                                                              double n, int m0, int m1,
                                                              double holder_M, double alpha1);

}  // namespace eqlab
