#pragma once

namespace eqlab {

// log Gamma(x) for x > 0.
[[nodiscard]] double log_gamma(double x);

// psi(x) = d/dx log Gamma(x) for x > 0.
[[nodiscard]] double digamma(double x);

// psi'(x) for x > 0.
[[nodiscard]] double trigamma(double x);

// log Gamma(a + d) - log Gamma(a) - d * psi(a), evaluated without the
// cancellation of the naive difference. Requires a > 0 and a + d > 0.
[[nodiscard]] double log_gamma_remainder(double a, double d);

// log(1 + x) - x without cancellation near 0.
[[nodiscard]] double log1pmx(double x);

// log Gamma(x) - [(x - 1/2) log x - x + log(2 pi) / 2].
[[nodiscard]] double stirling_remainder(double x);

// log(sum exp(x_i)) for a pair, stable for -inf inputs.
[[nodiscard]] double log_add_exp(double a, double b);

}  // namespace eqlab
