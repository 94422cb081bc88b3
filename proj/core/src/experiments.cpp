#include "eqlab/experiments.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "eqlab/samplers.hpp"
#include "eqlab/weights.hpp"

namespace eqlab {
namespace {

struct Fnv {
  std::uint64_t h = 14695981039346656037ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ULL;
    }
  }
  void add(double x) { bytes(&x, sizeof x); }
  void add(int x) { bytes(&x, sizeof x); }
  void add(const std::string& s) {
    bytes(s.data(), s.size());
    add(static_cast<int>(s.size()));
  }
};

// Sequence-shaped ladder with N(mean, sd_of(level, j)^2) entries, drawn
// scaling first, then level-major.
template <class Sd>
HaarLadder noisy_ladder(const HaarLadder& mean, Sd sd_of, RngStream& rng) {
  HaarLadder out = mean;
  for (std::size_t j = 0; j < out.scaling.size(); ++j) {
    out.scaling[j] += sd_of(mean.coarse_level, static_cast<int>(j), true) * rng.normal();
  }
  for (int i = mean.coarse_level; i < mean.fine_level; ++i) {
    auto& lv = out.level(i);
    for (std::size_t j = 0; j < lv.size(); ++j) lv[j] += sd_of(i, static_cast<int>(j), false) * rng.normal();
  }
  return out;
}

ExperimentDraw stamp(const ModelSpec& spec, Label label, const RngStream& rng) {
  ExperimentDraw d;
  d.label = label;
  d.k = spec.k;
  d.k0 = spec.k0;
  d.k1 = spec.k1;
  d.spec_hash = spec.hash();
  d.seed = rng.seed();
  d.stream = rng.stream_id();
  return d;
}

}  // namespace

void ModelSpec::validate() const {
  if (k < 2 || k > 26) throw std::invalid_argument("ModelSpec: k must lie in [2, 26]");
  if (k1 < 0 || k0 <= k1 || k0 >= k) {
    throw std::invalid_argument("ModelSpec: need 0 <= k1 < k0 < k (m0 / m1 even, m0 < n)");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("ModelSpec: sigma must be positive");
  if (mean_ladder.coarse_level != k0 || mean_ladder.fine_level != k) {
    throw std::invalid_argument("ModelSpec: mean ladder does not match the levels");
  }
}

std::uint64_t ModelSpec::hash() const {
  Fnv f;
  f.add(k);
  f.add(k0);
  f.add(k1);
  f.add(mean_name);
  f.add(logvar_name);
  f.add(sigma);
  for (double x : {params.alpha, params.amplitude, params.tau_level, params.tau_slope,
                   params.tau_curvature, params.tau_amplitude, params.holder_M, params.alpha1}) {
    f.add(x);
  }
  return f.h;
}

ModelSpec make_model_spec(const std::string& mean_name, const std::string& logvar_name, int k,
                          int k0, int k1, const FixtureParams& params, double sigma) {
  ModelSpec s;
  s.k = k;
  s.k0 = k0;
  s.k1 = k1;
  s.mean_name = mean_name;
  s.logvar_name = logvar_name;
  s.params = params;
  s.sigma = sigma;
  s.fixture = make_fixture(mean_name, logvar_name, params);
  if (k0 >= 0 && k0 <= k && k <= 26) s.mean_ladder = fixture_ladder(s.fixture.mean, k0, k);
  s.validate();
  return s;
}

int choose_coarse_level(const ClassSpec& cls, int k) {
  if (k < 2) throw std::invalid_argument("choose_coarse_level: need k >= 2");
  int best = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int k0 = 1; k0 <= k - 1; ++k0) {
    const double gap = std::abs(k0 - (k + std::log2(cls.gamma(k0))));
    if (gap < best_gap) {
      best_gap = gap;
      best = k0;
    }
  }
  return best;
}

std::string_view label_name(Label l) {
  switch (l) {
    case Label::P: return "P";
    case Label::Pbar: return "Pbar";
    case Label::Q: return "Q";
    case Label::Ptilde: return "Ptilde";
    case Label::Qtilde: return "Qtilde";
    case Label::Pcheck: return "Pcheck";
    case Label::Qcheck: return "Qcheck";
  }
  return "?";
}

Label parse_label(std::string_view s) {
  for (Label l : {Label::P, Label::Pbar, Label::Q, Label::Ptilde, Label::Qtilde, Label::Pcheck,
                  Label::Qcheck}) {
    if (label_name(l) == s) return l;
  }
  throw std::invalid_argument("unknown experiment label: " + std::string(s));
}

int coefficient_block(int level, int j, int k1) {
  if (level < k1) throw std::invalid_argument("coefficient_block: level coarser than the blocks");
  return (j >> (level - k1)) + 1;
}

BlockLogVariances block_log_variances(const ModelSpec& spec) {
  const int m1 = spec.m1();
  BlockLogVariances out;
  out.block.resize(static_cast<std::size_t>(m1));
  for (int l = 0; l < m1; ++l) {
    out.block[static_cast<std::size_t>(l)] =
        m1 * spec.fixture.logvar.integral(static_cast<double>(l) / m1, static_cast<double>(l + 1) / m1);
  }
  if (spec.fixture.logvar.constant) {
    const double c = spec.fixture.logvar.value(0.5);
    for (auto& b : out.block) b = c;
  }
  const WeightTable w = make_weight_table(spec.m0(), m1);
  out.cell = smoothed_cell_logs(w, out.block);
  out.star = recombined_block_logs(w, out.cell);
  return out;
}

ExperimentDraw sample_regression(const ModelSpec& spec, bool heteroscedastic, RngStream& rng) {
  spec.validate();
  ExperimentDraw d = stamp(spec, heteroscedastic ? Label::Pcheck : Label::P, rng);
  const std::size_t n = spec.n();
  d.y = evaluate_on_design(spec.fixture.mean.value, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1) / static_cast<double>(n);
    const double sd = heteroscedastic ? std::exp(0.5 * spec.fixture.logvar.value(t)) : spec.sigma;
    d.y[i] += sd * rng.normal();
  }
  return d;
}

ExperimentDraw sample_sequence(const ModelSpec& spec, bool blocked, RngStream& rng) {
  spec.validate();
  ExperimentDraw d = stamp(spec, blocked ? Label::Ptilde : Label::Pbar, rng);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(spec.n()));
  if (!blocked) {
    const double sd = spec.sigma * inv_sqrt_n;
    d.coeffs = noisy_ladder(spec.mean_ladder, [&](int, int, bool) { return sd; }, rng);
    return d;
  }
  const auto logs = block_log_variances(spec).block;
  std::vector<double> sd(logs.size());
  for (std::size_t l = 0; l < logs.size(); ++l) sd[l] = std::exp(0.5 * logs[l]) * inv_sqrt_n;
  d.coeffs = noisy_ladder(
      spec.mean_ladder,
      [&](int level, int j, bool) { return sd[static_cast<std::size_t>(coefficient_block(level, j, spec.k1) - 1)]; },
      rng);
  return d;
}

ExperimentDraw sample_q(const ModelSpec& spec, bool blocked, RngStream& rng) {
  spec.validate();
  ExperimentDraw d = stamp(spec, blocked ? Label::Qtilde : Label::Q, rng);
  const double n = static_cast<double>(spec.n());
  const int m1 = blocked ? spec.m1() : 1;
  const int k1 = blocked ? spec.k1 : 0;
  std::vector<double> sigma2(static_cast<std::size_t>(m1), spec.sigma * spec.sigma);
  if (blocked) {
    const auto logs = block_log_variances(spec).block;
    for (std::size_t l = 0; l < logs.size(); ++l) sigma2[l] = std::exp(logs[l]);
  }
  d.variances.resize(sigma2.size());
  for (std::size_t l = 0; l < sigma2.size(); ++l) {
    d.variances[l] = draw_gamma(n / (2.0 * m1), 2.0 * sigma2[l] * m1 / n, rng);
  }
  std::vector<double> sd(d.variances.size());
  for (std::size_t l = 0; l < sd.size(); ++l) sd[l] = std::sqrt(d.variances[l] / n);
  d.coeffs = noisy_ladder(
      spec.mean_ladder,
      [&](int level, int j, bool) { return sd[static_cast<std::size_t>(coefficient_block(level, j, k1) - 1)]; },
      rng);
  return d;
}

std::size_t default_process_cells(const ModelSpec& spec) {
  return std::max<std::size_t>(std::size_t{1} << 12, 16 * static_cast<std::size_t>(spec.m1()));
}

ExperimentDraw sample_q_check(const ModelSpec& spec, std::size_t cells, RngStream& rng) {
  spec.validate();
  const auto m1 = static_cast<std::size_t>(spec.m1());
  if (!is_dyadic(cells) || cells < m1) {
    throw std::invalid_argument("sample_q_check: grid must be a dyadic refinement of the blocks");
  }
  ExperimentDraw d = stamp(spec, Label::Qcheck, rng);
  const double n = static_cast<double>(spec.n());
  const double h = 1.0 / static_cast<double>(cells);
  const double v_sd = std::sqrt(2.0 * h / n);
  d.dv.resize(cells);
  for (std::size_t g = 0; g < cells; ++g) {
    d.dv[g] = spec.fixture.logvar.integral(g * h, (g + 1) * h) + v_sd * rng.normal();
  }
  const std::size_t per_block = cells / m1;
  d.z.resize(m1);
  for (std::size_t l = 0; l < m1; ++l) {
    double inc = 0.0;
    for (std::size_t g = l * per_block; g < (l + 1) * per_block; ++g) inc += d.dv[g];
    d.z[l] = std::exp(0.5 * static_cast<double>(m1) * inc);
  }
  d.dy.resize(cells);
  const double y_sd = std::sqrt(h / n);
  for (std::size_t g = 0; g < cells; ++g) {
    d.dy[g] = spec.fixture.mean.integral(g * h, (g + 1) * h) + d.z[g / per_block] * y_sd * rng.normal();
  }
  return d;
}

}  // namespace eqlab
