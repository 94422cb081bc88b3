#include "eqlab/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace eqlab {
namespace {

constexpr double kAsymptoticFrom = 10.0;

// log Gamma(x) - [(x - 1/2) log x - x + log(2 pi)/2]
double stirling_lgamma_tail(double x) {
  static constexpr double c[] = {1.0 / 12.0,     -1.0 / 360.0,     1.0 / 1260.0,
                                 -1.0 / 1680.0,  1.0 / 1188.0,     -691.0 / 360360.0,
                                 1.0 / 156.0,    -3617.0 / 122400.0};
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double sum = 0.0;
  double p = inv;
  for (double ck : c) {
    sum += ck * p;
    p *= inv2;
  }
  return sum;
}

// log x - 1/(2x) - psi(x)
double stirling_digamma_tail(double x) {
  static constexpr double c[] = {1.0 / 12.0,    -1.0 / 120.0, 1.0 / 252.0,
                                 -1.0 / 240.0,  1.0 / 132.0,  -691.0 / 32760.0,
                                 1.0 / 12.0,    -3617.0 / 8160.0};
  const double inv2 = 1.0 / (x * x);
  double sum = 0.0;
  double p = inv2;
  for (double ck : c) {
    sum += ck * p;
    p *= inv2;
  }
  return sum;
}

double trigamma_asymptotic(double x) {
  static constexpr double b[] = {1.0 / 6.0,   -1.0 / 30.0,   1.0 / 42.0, -1.0 / 30.0,
                                 5.0 / 66.0,  -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0};
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double sum = inv + 0.5 * inv2;
  double p = inv2 * inv;
  for (double bk : b) {
    sum += bk * p;
    p *= inv2;
  }
  return sum;
}

}  // namespace

double log1pmx(double x) {
  if (std::abs(x) < 0.1) {
    double term = x;
    double sum = 0.0;
    for (int k = 2; k < 40; ++k) {
      term *= -x;
      const double t = term / k;
      sum += t;
      if (std::abs(t) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::log1p(x) - x;
}

namespace {

// (1 + x) log(1 + x) - x
double one_plus_x_log1p_minus_x(double x) {
  if (std::abs(x) < 0.1) {
    double xk = -x;  // k = 2 term is +x^2 / 2
    double sum = 0.0;
    for (int k = 2; k < 40; ++k) {
      xk *= -x;
      const double t = xk / (static_cast<double>(k) * (k - 1));
      sum += t;
      if (std::abs(t) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (1.0 + x) * std::log1p(x) - x;
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error(what);
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma: argument must be positive and finite");
  double shift = 0.0;
  while (x < kAsymptoticFrom) {
    shift += std::log(x);
    x += 1.0;
  }
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  return (x - 0.5) * std::log(x) - x + half_log_2pi + stirling_lgamma_tail(x) - shift;
}

double digamma(double x) {
  require_positive(x, "digamma: argument must be positive and finite");
  double shift = 0.0;
  while (x < kAsymptoticFrom) {
    shift += 1.0 / x;
    x += 1.0;
  }
  return std::log(x) - 0.5 / x - stirling_digamma_tail(x) - shift;
}

double trigamma(double x) {
  require_positive(x, "trigamma: argument must be positive and finite");
  double shift = 0.0;
  while (x < kAsymptoticFrom) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  return trigamma_asymptotic(x) + shift;
}

double log_gamma_remainder(double a, double d) {
  require_positive(a, "log_gamma_remainder: a must be positive");
  if (!(a + d > 0.0) || !std::isfinite(d)) {
    throw std::domain_error("log_gamma_remainder: a + d must be positive");
  }
  if (d == 0.0) return 0.0;
  double correction = 0.0;
  while (std::min(a, a + d) < kAsymptoticFrom) {
    correction += log1pmx(d / a);
    a += 1.0;
  }
  const double x = d / a;
  const double main = a * one_plus_x_log1p_minus_x(x) - 0.5 * log1pmx(x);
  const double series = d * stirling_digamma_tail(a) + stirling_lgamma_tail(a + d) -
                        stirling_lgamma_tail(a);
  return main + series - correction;
}

double stirling_remainder(double x) {
  require_positive(x, "stirling_remainder: argument must be positive and finite");
  if (x >= kAsymptoticFrom) return stirling_lgamma_tail(x);
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  return log_gamma(x) - ((x - 0.5) * std::log(x) - x + half_log_2pi);
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace eqlab
