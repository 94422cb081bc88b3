#include "eqlab/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "eqlab/special.hpp"

namespace eqlab {
namespace {

// log of Gamma(shape, 1) for shape >= 1.
double log_gamma_mt(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d) + std::log(v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

double folded_triangle_cdf(double x, double centre, double half_width) {
  const double s = (x - centre) / half_width;
  if (s <= -1.0) return 0.0;
  if (s >= 1.0) return 1.0;
  if (s < 0.0) return 0.5 * (1.0 + s) * (1.0 + s);
  return 1.0 - 0.5 * (1.0 - s) * (1.0 - s);
}

void check_kernel_args(int ell, int m1) {
  if (m1 < 1 || ell < 1 || ell > m1) throw std::invalid_argument("kernel: need 1 <= l <= m1");
}

}  // namespace

double draw_log_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("draw_gamma: shape must be positive");
  }
  if (shape >= 1.0) return log_gamma_mt(shape, rng);
  const double boosted = log_gamma_mt(shape + 1.0, rng);
  return boosted + std::log(rng.uniform()) / shape;
}

double draw_gamma(double shape, double scale, RngStream& rng) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("draw_gamma: scale must be positive");
  }
  return std::exp(draw_log_gamma(shape, rng)) * scale;
}

std::vector<double> draw_dirichlet(const std::vector<double>& alphas, RngStream& rng) {
  if (alphas.empty()) throw std::invalid_argument("draw_dirichlet: empty parameter vector");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("draw_dirichlet: parameters must be positive");
    }
  }
  if (alphas.size() == 1) return {1.0};
  std::vector<double> logs(alphas.size());
  double lse = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    logs[i] = draw_log_gamma(alphas[i], rng);
    lse = log_add_exp(lse, logs[i]);
  }
  std::vector<double> out(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) out[i] = std::exp(logs[i] - lse);
  return out;
}

double draw_noncentral_chisq(double df, double lambda, RngStream& rng) {
  if (!(df > 0.0)) throw std::invalid_argument("draw_noncentral_chisq: df must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("draw_noncentral_chisq: noncentrality must be >= 0");
  }
  const auto k = rng.poisson(0.5 * lambda);
  return draw_gamma(0.5 * df + static_cast<double>(k), 2.0, rng);
}

std::vector<double> draw_conditional_gaussians(double total, std::size_t count, double scale,
                                               RngStream& rng) {
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("draw_conditional_gaussians: total must be positive");
  }
  if (count == 0) throw std::invalid_argument("draw_conditional_gaussians: count must be >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("draw_conditional_gaussians: bad scale");
  std::vector<double> z(count);
  double ss = 0.0;
  do {
    ss = 0.0;
    for (auto& v : z) {
      v = rng.normal();
      ss += v * v;
    }
  } while (!(ss > 0.0));
  const double radius = std::sqrt(total / (scale * ss));
  for (auto& v : z) v *= radius;
  return z;
}

std::vector<double> draw_conditional_gaussians(double total, std::size_t count, RngStream& rng) {
  return draw_conditional_gaussians(total, count, static_cast<double>(count), rng);
}

double kernel_value(int ell, int m1, double x) {
  check_kernel_args(ell, m1);
  if (x < 0.0 || x > 1.0) return 0.0;
  const double c = (2.0 * ell - 1.0) / (2.0 * m1);
  const auto hat = [&](double y) {
    return std::max(0.0, m1 - static_cast<double>(m1) * m1 * std::abs(y - c));
  };
  return hat(x) + hat(-x) + hat(2.0 - x);
}

double kernel_mass(int ell, int m1, double u, double v) {
  check_kernel_args(ell, m1);
  if (!(u <= v) || u < 0.0 || v > 1.0) throw std::invalid_argument("kernel_mass: bad interval");
  const double c = (2.0 * ell - 1.0) / (2.0 * m1);
  const double w = 1.0 / m1;
  const auto cdf = [&](double x) { return folded_triangle_cdf(x, c, w); };
  return (cdf(v) - cdf(u)) + (cdf(-u) - cdf(-v)) + (cdf(2.0 - u) - cdf(2.0 - v));
}

BridgeNoise draw_bridge_process(int ell, int m1, std::size_t cells, RngStream& rng) {
  check_kernel_args(ell, m1);
  if (cells == 0 || cells % (2 * static_cast<std::size_t>(m1)) != 0) {
    throw std::invalid_argument("draw_bridge_process: grid must refine the kernel support");
  }
  BridgeNoise out;
  out.ell = ell;
  out.m1 = m1;
  out.cells = cells;
  out.kernel_masses.resize(cells);
  out.increments.assign(cells, 0.0);
  const double h = 1.0 / static_cast<double>(cells);
  for (std::size_t g = 0; g < cells; ++g) {
    out.kernel_masses[g] = kernel_mass(ell, m1, g * h, std::min(1.0, (g + 1) * h));
  }
  double total = 0.0;
  for (std::size_t g = 0; g < cells; ++g) {
    const double kappa = out.kernel_masses[g];
    if (kappa > 0.0) {
      out.increments[g] = std::sqrt(kappa) * rng.normal();
      total += out.increments[g];
    }
  }
  for (std::size_t g = 0; g < cells; ++g) out.increments[g] -= out.kernel_masses[g] * total;
  return out;
}

}  // namespace eqlab
