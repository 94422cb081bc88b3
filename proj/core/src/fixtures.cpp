#include "eqlab/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eqlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kTailLevels = 20;
constexpr double kZeroMeanGamma = 1e-12;

// Values on the cells ((j-1)/8, j/8].
constexpr std::array<double, 8> kPiecewiseValues = {0.5, -1.0, 0.25, 1.0, 0.0, -0.5, 0.75, -0.25};

std::size_t piecewise_cell(double t) {
  const double c = std::ceil(8.0 * std::clamp(t, 0.0, 1.0)) - 1.0;
  return static_cast<std::size_t>(std::clamp(c, 0.0, 7.0));
}

// Integral over [0, t] of a piecewise-constant function on eighths.
double piecewise_primitive(double t, double amplitude, bool squared) {
  t = std::clamp(t, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < 8; ++j) {
    const double lo = j / 8.0;
    if (t <= lo) break;
    const double width = std::min(t, (j + 1) / 8.0) - lo;
    const double v = amplitude * kPiecewiseValues[j];
    acc += (squared ? v * v : v) * width;
  }
  return acc;
}

// Remainder of the Besov tails beyond kTailLevels from |theta_ij| <= L 2^(-3i/2) / 4.
double lipschitz_remainder(double lipschitz, double alpha, BesovNorm mode, int from) {
  if (lipschitz == 0.0) return 0.0;
  if (mode == BesovNorm::L2) {
    const double r = std::exp2(2.0 * alpha - 2.0);
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    return lipschitz * lipschitz / 16.0 * std::pow(r, from) / (1.0 - r);
  }
  const double r = std::exp2(alpha - 1.0);
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  return lipschitz / 4.0 * std::pow(r, from) / (1.0 - r);
}

double lipschitz_gamma_scale(double lipschitz, double alpha) {
  if (!(alpha < 1.0)) {
    throw std::invalid_argument("make_fixture: Lipschitz means need alpha < 1 for a finite class");
  }
  const double sup_l1 = 1.0 / (4.0 * (1.0 - std::exp2(alpha - 1.0)));
  const double l2 = 1.0 / (4.0 * std::sqrt(1.0 - std::exp2(2.0 * alpha - 2.0)));
  return lipschitz * std::max(sup_l1, l2);
}

}  // namespace

double ClassSpec::gamma(int k) const { return gamma_scale * std::exp2(k * (alpha - alpha_star)); }

void ClassSpec::validate() const {
  if (!(alpha > 0.5 && alpha <= 1.0)) throw std::invalid_argument("ClassSpec: alpha must lie in (1/2, 1]");
  if (!(alpha1 > 1.0)) throw std::invalid_argument("ClassSpec: alpha1 must exceed 1");
  if (!(holder_M > 0.0)) throw std::invalid_argument("ClassSpec: M must be positive");
  if (!(gamma_scale > 0.0)) throw std::invalid_argument("ClassSpec: gamma must be positive");
  if (alpha > alpha_star) throw std::invalid_argument("ClassSpec: gamma must be non-increasing");
}

std::vector<std::string> mean_fixture_names() { return {"zero", "sine", "polynomial", "piecewise"}; }

std::vector<std::string> logvar_fixture_names() {
  return {"constant", "linear", "quadratic", "smooth"};
}

MeanFixture make_mean_fixture(const std::string& name, const FixtureParams& p) {
  MeanFixture f;
  f.name = name;
  const double a = p.amplitude;
  if (name == "zero") {
    f.value = [](double) { return 0.0; };
    f.primitive = [](double) { return 0.0; };
    f.square_primitive = [](double) { return 0.0; };
    f.lipschitz = 0.0;
    f.vanishing_level = 0;
  } else if (name == "sine") {
    f.value = [a](double t) { return a * std::sin(kTwoPi * t); };
    f.primitive = [a](double t) { return -a * std::cos(kTwoPi * t) / kTwoPi; };
    f.square_primitive = [a](double t) {
      return a * a * (0.5 * t - std::sin(2.0 * kTwoPi * t) / (4.0 * kTwoPi));
    };
    f.lipschitz = kTwoPi * std::abs(a);
  } else if (name == "polynomial") {
    // a (4 t (1 - t) - 2/3): zero mean, slope bounded by 4a.
    f.value = [a](double t) { return a * (4.0 * t * (1.0 - t) - 2.0 / 3.0); };
    f.primitive = [a](double t) { return a * (2.0 * t * t - 4.0 * t * t * t / 3.0 - 2.0 * t / 3.0); };
    f.square_primitive = [a](double t) {
      const double t2 = t * t;
      const double t3 = t2 * t;
      return a * a *
             (16.0 * (t3 / 3.0 - t2 * t2 / 2.0 + t3 * t2 / 5.0) -
              16.0 / 3.0 * (t2 / 2.0 - t3 / 3.0) + 4.0 * t / 9.0);
    };
    f.lipschitz = 4.0 * std::abs(a);
  } else if (name == "piecewise") {
    f.value = [a](double t) { return a * kPiecewiseValues[piecewise_cell(t)]; };
    f.primitive = [a](double t) { return piecewise_primitive(t, a, false); };
    f.square_primitive = [a](double t) { return piecewise_primitive(t, a, true); };
    f.lipschitz = std::numeric_limits<double>::infinity();
    f.vanishing_level = 3;
  } else {
    throw std::invalid_argument("unknown mean fixture '" + name + "'");
  }
  return f;
}

LogVarFixture make_logvar_fixture(const std::string& name, const FixtureParams& p) {
  LogVarFixture t;
  t.name = name;
  t.alpha1 = p.alpha1;
  if (name == "constant") {
    const double c = p.tau_level;
    t.value = [c](double) { return c; };
    t.derivative = [](double) { return 0.0; };
    t.primitive = [c](double x) { return c * x; };
    t.holder_M = p.holder_M;
    t.constant = true;
  } else if (name == "linear") {
    const double c = p.tau_level;
    const double b = p.tau_slope;
    t.value = [c, b](double x) { return c + b * x; };
    t.derivative = [b](double) { return b; };
    t.primitive = [c, b](double x) { return c * x + 0.5 * b * x * x; };
    t.holder_M = std::abs(b) > 0.0 ? std::abs(b) : p.holder_M;
    t.constant = b == 0.0;
  } else if (name == "quadratic") {
    const double c = p.tau_curvature;
    t.value = [c](double x) { return c * x * x; };
    t.derivative = [c](double x) { return 2.0 * c * x; };
    t.primitive = [c](double x) { return c * x * x * x / 3.0; };
    t.holder_M = 2.0 * std::abs(c);
    t.alpha1 = std::min(p.alpha1, 2.0);
  } else if (name == "smooth") {
    const double a = p.tau_amplitude;
    t.value = [a](double x) { return a * std::sin(kTwoPi * x); };
    t.derivative = [a](double x) { return a * kTwoPi * std::cos(kTwoPi * x); };
    t.primitive = [a](double x) { return -a * std::cos(kTwoPi * x) / kTwoPi; };
    t.holder_M = kTwoPi * kTwoPi * std::abs(a);
    t.alpha1 = std::min(p.alpha1, 2.0);
  } else {
    throw std::invalid_argument("unknown log-variance fixture '" + name + "'");
  }
  if (!(t.alpha1 > 1.0 && t.alpha1 <= 2.0)) {
    throw std::invalid_argument("log-variance fixture: alpha1 must lie in (1, 2]");
  }
  if (!(t.holder_M > 0.0)) throw std::invalid_argument("log-variance fixture: M must be positive");
  return t;
}

HaarLadder fixture_ladder(const MeanFixture& f, int coarse_level, int fine_level) {
  HaarLadder l = make_zero_ladder(coarse_level, fine_level);
  const double m0 = std::exp2(coarse_level);
  for (std::size_t j = 0; j < l.scaling.size(); ++j) {
    l.scaling[j] = std::sqrt(m0) * f.integral(j / m0, (j + 1) / m0);
  }
  for (int i = coarse_level; i < fine_level; ++i) {
    auto& w = l.level(i);
    const double h = std::exp2(-i);
    const double norm = std::exp2(0.5 * i);
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double a = j * h;
      const double mid = a + 0.5 * h;
      w[j] = norm * (2.0 * f.primitive(mid) - f.primitive(a) - f.primitive(a + h));
    }
  }
  return l;
}

std::vector<LevelStats> fixture_level_stats(const MeanFixture& f, int max_level) {
  std::vector<LevelStats> out;
  for (int i = 0; i < max_level; ++i) {
    LevelStats s{i, 0.0, 0.0};
    if (f.vanishing_level < 0 || i < f.vanishing_level) {
      const std::size_t count = std::size_t{1} << i;
      const double h = std::exp2(-i);
      const double norm = std::exp2(0.5 * i);
      for (std::size_t j = 0; j < count; ++j) {
        const double a = j * h;
        const double t = norm * (2.0 * f.primitive(a + 0.5 * h) - f.primitive(a) - f.primitive(a + h));
        s.sum_sq += t * t;
        s.max_abs = std::max(s.max_abs, std::abs(t));
      }
    }
    out.push_back(s);
  }
  return out;
}

double fixture_besov_tail(const MeanFixture& f, double alpha, BesovNorm mode, int from_level) {
  const int top = std::max(kTailLevels + 1, from_level);
  auto stats = fixture_level_stats(f, f.vanishing_level >= 0 ? std::min(top, f.vanishing_level) : top);
  if (f.vanishing_level >= 0) return besov_tail(stats, alpha, mode, from_level);
  // Fine-level coefficients come from differences of O(1) primitives; rounding
  // can push them past the Lipschitz certificate, which holds exactly.
  for (auto& s : stats) {
    const double cap = f.lipschitz * std::exp2(-1.5 * s.level) / 4.0;
    s.max_abs = std::min(s.max_abs, cap);
    s.sum_sq = std::min(s.sum_sq, std::exp2(s.level) * cap * cap);
  }
  const double rem = lipschitz_remainder(f.lipschitz, alpha, mode, top);
  if (mode == BesovNorm::L2) {
    const double head = besov_tail(stats, alpha, mode, from_level);
    return std::sqrt(head * head + rem);
  }
  return besov_tail(stats, alpha, mode, from_level) + rem;
}

double fixture_tail_energy(const MeanFixture& f, int coarse_level, double a, double b) {
  const double m0 = std::exp2(coarse_level);
  const auto first = static_cast<std::size_t>(std::llround(a * m0));
  const auto last = static_cast<std::size_t>(std::llround(b * m0));
  double acc = 0.0;
  for (std::size_t j = first; j < last; ++j) {
    const double lo = j / m0;
    const double hi = (j + 1) / m0;
    const double s = f.integral(lo, hi);
    acc += f.square_integral(lo, hi) - s * s * m0;
  }
  return std::max(acc, 0.0);
}

double fixture_tail_energy(const MeanFixture& f, int coarse_level) {
  return fixture_tail_energy(f, coarse_level, 0.0, 1.0);
}

Fixture make_fixture(const std::string& mean_name, const std::string& logvar_name,
                     const FixtureParams& p) {
  Fixture fx{make_mean_fixture(mean_name, p), make_logvar_fixture(logvar_name, p), {}};
  ClassSpec& c = fx.cls;
  c.alpha = p.alpha;
  c.alpha_star = 1.0;
  c.alpha1 = fx.logvar.alpha1;
  c.holder_M = fx.logvar.holder_M;
  if (mean_name == "zero") {
    c.gamma_scale = kZeroMeanGamma;
  } else if (fx.mean.vanishing_level >= 0) {
    // Tails vanish from the last nonzero level on; take the worst ratio below it.
    const auto stats = fixture_level_stats(fx.mean, fx.mean.vanishing_level);
    double scale = 0.0;
    for (int k = 0; k < fx.mean.vanishing_level; ++k) {
      const double decay = std::exp2(k * (c.alpha - 1.0));
      scale = std::max({scale, besov_tail(stats, c.alpha, BesovNorm::L2, k) / decay,
                        besov_tail(stats, c.alpha, BesovNorm::SupL1, k) / decay});
    }
    c.gamma_scale = scale * (1.0 + 1e-12);
  } else {
    c.gamma_scale = lipschitz_gamma_scale(fx.mean.lipschitz, c.alpha);
  }
  c.validate();
  const auto h = check_holder(fx.logvar, c.holder_M, c.alpha1);
  if (!h.holds) throw std::logic_error("make_fixture: Holder certificate failed for " + logvar_name);
  return fx;
}

std::vector<double> evaluate_on_design(const std::function<double(double)>& g, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = g(static_cast<double>(i + 1) / static_cast<double>(n));
  return out;
}

HolderCheck check_holder(const LogVarFixture& tau, double M, double alpha1, int points) {
  HolderCheck out;
  std::vector<double> x(points);
  std::vector<double> d(points);
  for (int i = 0; i < points; ++i) {
    x[i] = static_cast<double>(i) / (points - 1);
    d[i] = tau.derivative(x[i]);
    out.max_derivative = std::max(out.max_derivative, std::abs(d[i]));
  }
  for (int i = 0; i < points; ++i) {
    for (int j = i + 1; j < points; ++j) {
      const double ratio = std::abs(d[j] - d[i]) / std::pow(x[j] - x[i], alpha1 - 1.0);
      out.max_holder_ratio = std::max(out.max_holder_ratio, ratio);
    }
  }
  const double slack = 1.0 + 1e-9;
  out.holds = out.max_derivative <= M * slack && out.max_holder_ratio <= M * slack;
  return out;
}

}  // namespace eqlab
