#include "eqlab/divergence.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "eqlab/special.hpp"
#include "eqlab/weights.hpp"

namespace eqlab {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kMixtureTail = 1e-12;

QuadratureOptions oracle_options() {
  QuadratureOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-12;
  o.max_intervals = 20000;
  return o;
}

// Density of log X for X ~ Gamma(shape, scale), at w.
double log_gamma_logdensity(double w, double shape, double scale) {
  return shape * w - std::exp(w) / scale - log_gamma(shape) - shape * std::log(scale);
}

struct LogRange {
  double lo, hi;
};

LogRange gamma_log_range(const GammaParams& g) {
  const double mode = std::log(g.shape * g.scale);
  const double lo = mode - std::max(40.0 / std::sqrt(g.shape), 75.0 / g.shape);
  const double hi = std::log(g.scale * (g.shape + 40.0 * std::sqrt(g.shape) + 100.0));
  return {lo, hi};
}

double gamma_cell_mass(double shape, double scale, double lo, double hi) {
  const double a = std::max(lo, 0.0) / scale;
  const double b = std::max(hi, 0.0) / scale;
  if (b <= a) return 0.0;
  if (b <= shape) return boost::math::gamma_p(shape, b) - boost::math::gamma_p(shape, a);
  return boost::math::gamma_q(shape, a) - boost::math::gamma_q(shape, b);
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Circular convolution of several nonnegative mass vectors of equal length.
std::vector<double> convolve_all(const std::vector<std::vector<double>>& parts) {
  const std::size_t n = parts.front().size();
  const std::size_t nc = n / 2 + 1;
  std::vector<double> buf(n);
  std::vector<std::complex<double>> spec(nc);
  std::vector<std::complex<double>> acc(nc, {1.0, 0.0});
  fftw_plan fwd;
  fftw_plan inv;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.data(),
                               reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(spec.data()),
                               buf.data(), FFTW_ESTIMATE);
  }
  for (const auto& p : parts) {
    std::copy(p.begin(), p.end(), buf.begin());
    fftw_execute(fwd);
    for (std::size_t k = 0; k < nc; ++k) acc[k] *= spec[k];
  }
  spec = acc;
  fftw_execute(inv);
  for (auto& v : buf) v /= static_cast<double>(n);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  return buf;
}

double clamp_nonnegative(double d) { return d < 0.0 ? 0.0 : d; }

}  // namespace

void GammaParams::validate() const {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
    throw std::invalid_argument("gamma parameters must be positive and finite");
  }
}

void NormalParams::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
    throw std::invalid_argument("normal variance must be positive and finite");
  }
}

double kl_normal(const NormalParams& p, const NormalParams& q) {
  p.validate();
  q.validate();
  const double ratio_m1 = (p.variance - q.variance) / q.variance;
  const double d = p.mean - q.mean;
  return clamp_nonnegative(-0.5 * log1pmx(ratio_m1) + d * d / (2.0 * q.variance));
}

double kl_gamma_exact(const GammaParams& p, const GammaParams& q) {
  p.validate();
  q.validate();
  const double delta = q.shape - p.shape;
  const double t = (p.scale - q.scale) / q.scale;  // scale ratio minus one
  const double scale_part = -p.shape * log1pmx(t) - delta * std::log1p(t);
  return clamp_nonnegative(log_gamma_remainder(p.shape, delta) + scale_part);
}

double kl_gamma_equal_mean(double alpha1, double alpha2) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw std::invalid_argument("shapes must be positive");
  const double delta = alpha2 - alpha1;
  const double t = delta / alpha1;
  return clamp_nonnegative(log_gamma_remainder(alpha1, delta) - alpha1 * log1pmx(t) -
                           delta * std::log1p(t));
}

double gamma_same_mean_leading(double alpha1, double alpha2) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw std::invalid_argument("shapes must be positive");
  const double d = alpha1 - alpha2;
  return d * d / (2.0 * alpha1 * alpha1);
}

double gamma_noncentral_kl_bound(double alpha1, double alpha2, double lam) {
  if (!(alpha1 > 1.0)) throw std::invalid_argument("noncentral bound needs alpha1 > 1");
  if (!(alpha2 > 0.0)) throw std::invalid_argument("alpha2 must be positive");
  if (!(lam >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  return gamma_same_mean_leading(alpha1, alpha2) + lam * lam / (2.0 * alpha2) + lam / (alpha1 - 1.0);
}

QuadratureResult kl_quadrature(const std::function<double(double)>& log_p,
                               const std::function<double(double)>& log_q, double a, double b,
                               const QuadratureOptions& opt) {
  const auto integrand = [&](double x) {
    const double lp = log_p(x);
    if (lp < -745.0) return 0.0;
    const double lq = log_q(x);
    if (!std::isfinite(lq)) throw std::domain_error("kl_quadrature: support mismatch");
    return std::exp(lp) * (lp - lq);
  };
  QuadratureResult r = integrate(integrand, a, b, opt);
  if (!std::isfinite(r.value)) throw std::domain_error("kl_quadrature: non-integrable ratio");
  return r;
}

QuadratureResult kl_normal_quadrature(const NormalParams& p, const NormalParams& q) {
  p.validate();
  q.validate();
  const auto logpdf = [](const NormalParams& g) {
    return [g](double x) {
      const double z = x - g.mean;
      return -kHalfLog2Pi - 0.5 * std::log(g.variance) - z * z / (2.0 * g.variance);
    };
  };
  const double sd = std::sqrt(p.variance);
  return kl_quadrature(logpdf(p), logpdf(q), p.mean - 40.0 * sd, p.mean + 40.0 * sd,
                       oracle_options());
}

QuadratureResult kl_gamma_quadrature(const GammaParams& p, const GammaParams& q) {
  p.validate();
  q.validate();
  const auto range = gamma_log_range(p);
  return kl_quadrature([&](double w) { return log_gamma_logdensity(w, p.shape, p.scale); },
                       [&](double w) { return log_gamma_logdensity(w, q.shape, q.scale); },
                       range.lo, range.hi, oracle_options());
}

QuadratureResult kl_gamma_vs_poisson_mixture(const GammaParams& p, const GammaParams& base,
                                             double lam) {
  p.validate();
  base.validate();
  if (!(lam >= 0.0) || !std::isfinite(lam)) throw std::invalid_argument("lambda must be >= 0");
  std::vector<double> log_w;
  if (lam == 0.0) {
    log_w.push_back(0.0);
  } else {
    double cumulative = 0.0;
    for (int k = 0; cumulative < 1.0 - kMixtureTail; ++k) {
      const double lw = k * std::log(lam) - lam - log_gamma(k + 1.0);
      log_w.push_back(lw);
      cumulative += std::exp(lw);
      if (k > 100000) throw std::domain_error("Poisson mixture too wide");
    }
    const double norm = std::log(cumulative);
    for (auto& lw : log_w) lw -= norm;
  }
  std::vector<double> log_gamma_shape(log_w.size());
  for (std::size_t k = 0; k < log_w.size(); ++k) log_gamma_shape[k] = log_gamma(base.shape + k);
  const double log_scale = std::log(base.scale);
  const auto log_q = [&](double w) {
    const double ew = std::exp(w) / base.scale;
    double acc = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < log_w.size(); ++k) {
      const double a = base.shape + static_cast<double>(k);
      acc = log_add_exp(acc, log_w[k] + a * (w - log_scale) - ew - log_gamma_shape[k]);
    }
    return acc;
  };
  const auto range = gamma_log_range(p);
  return kl_quadrature([&](double w) { return log_gamma_logdensity(w, p.shape, p.scale); }, log_q,
                       range.lo, range.hi, oracle_options());
}

KlCheck kl_loggamma_vs_normal(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  KlCheck out;
  out.exact = clamp_nonnegative(alpha * std::expm1(0.5 / alpha) - 0.5 + stirling_remainder(alpha));
  out.bound = 1.0 / (3.0 * alpha);
  const double mu = std::log(alpha);
  const double var = 1.0 / alpha;
  const double lg = log_gamma(alpha);
  const auto log_p = [&](double w) {
    const double z = w - mu;
    return -kHalfLog2Pi - 0.5 * std::log(var) - z * z / (2.0 * var);
  };
  const auto log_q = [&](double w) { return alpha * w - std::exp(w) - lg; };
  const double sd = std::sqrt(var);
  const auto r = kl_quadrature(log_p, log_q, mu - 40.0 * sd, mu + 40.0 * sd, oracle_options());
  out.oracle = r.value;
  out.oracle_error = r.abs_error;
  return out;
}

void GammaSumSpec::validate() const {
  if (weights.empty() || weights.size() != log_scales.size()) {
    throw std::invalid_argument("GammaSumSpec: weights and log-scales must match and be non-empty");
  }
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("GammaSumSpec: n must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) throw std::invalid_argument("GammaSumSpec: weights must be positive");
    if (!std::isfinite(log_scales[i])) throw std::domain_error("GammaSumSpec: non-finite log-scale");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("GammaSumSpec: weights must sum to 1");
}

double GammaSumSpec::log_sigma_bar2() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * log_scales[i];
  return acc;
}

std::vector<double> GammaSumSpec::residuals() const {
  const double bar = log_sigma_bar2();
  std::vector<double> r(weights.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = log_scales[i] - bar;
  return r;
}

double kl_gamma_sum_joint(const GammaSumSpec& spec) {
  spec.validate();
  const auto r = spec.residuals();
  const double bar = std::exp(spec.log_sigma_bar2());
  double joint = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] == 0.0) continue;
    if (!(1.0 + r[i] > 0.0)) throw std::domain_error("kl_gamma_sum: need 1 + r_i > 0");
    const double d = spec.weights[i];
    joint += kl_gamma_exact({d * spec.n, std::exp(spec.log_scales[i]) / spec.n},
                            {d * (1.0 + r[i]) * spec.n, bar / spec.n});
  }
  return joint;
}

double kl_gamma_sum_bound(const GammaSumSpec& spec) {
  spec.validate();
  const auto r = spec.residuals();
  double b = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double r2 = r[i] * r[i];
    b += spec.n * spec.weights[i] * r2 * r2 / 8.0 + r2 / 4.0;
  }
  return b;
}

GammaSumResult kl_gamma_sum(const GammaSumSpec& spec, int grid_points) {
  GammaSumResult out;
  out.joint = kl_gamma_sum_joint(spec);
  out.paper_bound = kl_gamma_sum_bound(spec);
  const auto r = spec.residuals();
  if (grid_points <= 0 || std::all_of(r.begin(), r.end(), [](double x) { return x == 0.0; })) {
    return out;  // an equal-scale sum is exactly the target gamma
  }
  const double bar2 = std::exp(spec.log_sigma_bar2());
  double mean = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double s2 = std::exp(spec.log_scales[i]);
    mean += spec.weights[i] * s2;
    var += spec.weights[i] * s2 * s2 / spec.n;
  }
  const double upper = std::max(mean, bar2) + 12.0 * std::sqrt(std::max(var, bar2 * bar2 / spec.n));
  const auto cells = static_cast<std::size_t>(grid_points);
  const double h = upper / static_cast<double>(cells);
  // Cells centred on g h so that centres add under convolution.
  const auto discretise = [&](double shape, double scale) {
    std::vector<double> mass(2 * cells, 0.0);
    for (std::size_t g = 0; g < cells; ++g) {
      mass[g] = gamma_cell_mass(shape, scale, (g - 0.5) * h, (g + 0.5) * h);
    }
    return mass;
  };
  std::vector<std::vector<double>> parts;
  for (std::size_t i = 0; i < r.size(); ++i) {
    parts.push_back(discretise(spec.weights[i] * spec.n, std::exp(spec.log_scales[i]) / spec.n));
  }
  const auto sum = convolve_all(parts);
  const auto target = discretise(spec.n, bar2 / spec.n);
  const double peak = *std::max_element(sum.begin(), sum.begin() + static_cast<std::ptrdiff_t>(cells));
  double kl = 0.0;
  for (std::size_t g = 0; g < cells; ++g) {
    const double p = sum[g];
    if (!(p > 1e-15 * peak)) continue;
    const double q = target[g];
    if (!(q > 0.0)) throw std::domain_error("kl_gamma_sum: grid underflow in the target density");
    kl += p * std::log(p / q);
  }
  out.numeric = clamp_nonnegative(kl);
  return out;
}

RemainderExpansion loggamma_taylor_remainder(double alpha, double delta) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(alpha + delta > 0.0)) throw std::domain_error("alpha + delta must be positive");
  RemainderExpansion out;
  out.exact = log_gamma_remainder(alpha, delta);
  const double a2 = alpha * alpha;
  const double d2 = delta * delta;
  out.expansion = 0.5 * d2 * (1.0 / alpha + 0.5 / a2) - d2 * delta / (6.0 * a2) +
                  d2 * d2 / (12.0 * a2 * alpha);
  return out;
}

std::vector<SmoothingPenalty> smoothing_penalty(const std::vector<double>& block_logs, double n,
                                                int m0, int m1, double holder_M, double alpha1) {
  if (m1 < 2) throw std::invalid_argument("smoothing_penalty: need m1 >= 2");
  if (block_logs.size() != static_cast<std::size_t>(m1)) {
    throw std::invalid_argument("smoothing_penalty: need m1 block log-variances");
  }
  if (!(n > m0)) throw std::invalid_argument("smoothing_penalty: need n > m0");
  const WeightTable w = make_weight_table(m0, m1);
  const auto cell_logs = smoothed_cell_logs(w, block_logs);
  const auto star = recombined_block_logs(w, cell_logs);
  const int q = w.cells_per_block();
  const double lead = (n - m0) / (2.0 * m0);
  const double bound_lead = 3.0 * (n - m0) / (128.0 * m1);
  const double env_lead = holder_M * holder_M * (n - m0) / m1;
  std::vector<double> r(static_cast<std::size_t>(m1) + 1, 0.0);  // r_0 .. r_{m1}
  for (int ell = 1; ell < m1; ++ell) {
    r[static_cast<std::size_t>(ell)] =
        block_logs[static_cast<std::size_t>(ell)] - block_logs[static_cast<std::size_t>(ell - 1)];
  }
  std::vector<SmoothingPenalty> out;
  for (int ell = 1; ell <= m1; ++ell) {
    const auto l = static_cast<std::size_t>(ell - 1);
    SmoothingPenalty s;
    s.block = ell;
    s.interior = ell > 1 && ell < m1;
    const double a = block_logs[l] - star[l];
    double acc = 0.0;
    for (int t = 0; t < q; ++t) {
      const double b = cell_logs[l * static_cast<std::size_t>(q) + static_cast<std::size_t>(t)] - block_logs[l];
      acc += a - std::exp(b) * std::expm1(a);
    }
    s.exact = lead * acc;
    const double diff = r[l] - r[l + 1];
    s.bound = bound_lead * diff * diff;
    s.envelope = env_lead * (s.interior ? std::pow(m1, -2.0 * alpha1) : 1.0 / (double(m1) * m1));
    out.push_back(s);
  }
  return out;
}

}  // namespace eqlab
