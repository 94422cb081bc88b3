#include "eqlab/couplings.hpp"

#include <cmath>
#include <stdexcept>

#include "eqlab/samplers.hpp"
#include "eqlab/wavelet.hpp"

namespace eqlab {
namespace {

void require_shape(const ExperimentDraw& d, const DrawShape& s, Label expected, const char* what) {
  if (d.label != expected) throw std::invalid_argument(std::string(what) + ": wrong input experiment");
  if (!(shape_of(d) == s)) throw std::invalid_argument(std::string(what) + ": draw/shape mismatch");
}

// Visits the wavelet slots of block `ell` (1-based) at levels [k0, k),
// level-major then j ascending.
template <class F>
void for_block_wavelets(HaarLadder& ladder, int k1, int ell, F&& f) {
  for (int i = ladder.coarse_level; i < ladder.fine_level; ++i) {
    auto& lv = ladder.level(i);
    const std::size_t width = std::size_t{1} << (i - k1);
    const std::size_t start = static_cast<std::size_t>(ell - 1) * width;
    for (std::size_t j = start; j < start + width; ++j) f(lv[j]);
  }
}

std::vector<double> block_vhat(HaarLadder ladder, const DrawShape& s, int k1, bool skip_normalizer) {
  const int m1 = 1 << k1;
  const double n = static_cast<double>(s.n());
  const double norm = skip_normalizer ? 1.0 : n * m1 / (n - s.m0());
  std::vector<double> vhat(static_cast<std::size_t>(m1));
  for (int ell = 1; ell <= m1; ++ell) {
    double acc = 0.0;
    for_block_wavelets(ladder, k1, ell, [&](double& x) { acc += x * x; });
    vhat[static_cast<std::size_t>(ell - 1)] = norm * acc;
  }
  return vhat;
}

CouplingOutput to_q_shape(const ExperimentDraw& in, const DrawShape& s, int k1, Label out_label,
                          RngStream& rng, const CouplingOptions& opt) {
  CouplingOutput out;
  out.vhat = block_vhat(in.coeffs, s, k1, opt.skip_normalizer);
  out.draw = in;
  out.draw.label = out_label;
  out.draw.variances = out.vhat;
  out.draw.seed = rng.seed();
  out.draw.stream = rng.stream_id();
  const double n = static_cast<double>(s.n());
  std::vector<double> sd(out.vhat.size());
  for (std::size_t l = 0; l < sd.size(); ++l) sd[l] = std::sqrt(out.vhat[l] / n);
  auto& ladder = out.draw.coeffs;
  for (int i = ladder.coarse_level; i < ladder.fine_level; ++i) {
    auto& lv = ladder.level(i);
    for (std::size_t j = 0; j < lv.size(); ++j) {
      lv[j] = sd[static_cast<std::size_t>(coefficient_block(i, static_cast<int>(j), k1) - 1)] * rng.normal();
    }
  }
  return out;
}

CouplingOutput from_q_shape(const ExperimentDraw& in, const DrawShape& s, int k1, Label out_label,
                            RngStream& rng) {
  const int m1 = 1 << k1;
  if (in.variances.size() != static_cast<std::size_t>(m1)) {
    throw std::invalid_argument("coupling: expected one variance statistic per block");
  }
  CouplingOutput out;
  out.draw = in;
  out.draw.label = out_label;
  out.draw.variances.clear();
  out.draw.seed = rng.seed();
  out.draw.stream = rng.stream_id();
  const std::size_t n = s.n();
  const std::size_t per_block = n / static_cast<std::size_t>(m1);
  for (int ell = 1; ell <= m1; ++ell) {
    const double v = in.variances[static_cast<std::size_t>(ell - 1)];
    if (!(v > 0.0)) throw std::domain_error("coupling: variance statistic must be positive");
    const auto x = draw_conditional_gaussians(static_cast<double>(n) * v / m1, per_block,
                                              static_cast<double>(n), rng);
    std::size_t next = 0;
    for_block_wavelets(out.draw.coeffs, k1, ell, [&](double& slot) { slot = x[next++]; });
    out.aux.insert(out.aux.end(), x.begin() + static_cast<std::ptrdiff_t>(next), x.end());
  }
  return out;
}

}  // namespace

void DrawShape::validate() const {
  if (k < 2 || k > 26 || k1 < 0 || k0 <= k1 || k0 >= k) {
    throw std::invalid_argument("DrawShape: need 0 <= k1 < k0 < k <= 26");
  }
}

DrawShape shape_of(const ModelSpec& spec) { return {spec.k, spec.k0, spec.k1}; }
DrawShape shape_of(const ExperimentDraw& draw) { return {draw.k, draw.k0, draw.k1}; }

CouplingOutput pbar_to_q(const ExperimentDraw& pbar, const DrawShape& shape, RngStream& rng,
                         const CouplingOptions& opt) {
  shape.validate();
  require_shape(pbar, shape, Label::Pbar, "pbar_to_q");
  return to_q_shape(pbar, shape, 0, Label::Q, rng, opt);
}

CouplingOutput q_to_pbar(const ExperimentDraw& q, const DrawShape& shape, RngStream& rng) {
  shape.validate();
  require_shape(q, shape, Label::Q, "q_to_pbar");
  return from_q_shape(q, shape, 0, Label::Pbar, rng);
}

CouplingOutput ptilde_to_qtilde(const ExperimentDraw& ptilde, const DrawShape& shape, RngStream& rng,
                                const CouplingOptions& opt) {
  shape.validate();
  require_shape(ptilde, shape, Label::Ptilde, "ptilde_to_qtilde");
  return to_q_shape(ptilde, shape, shape.k1, Label::Qtilde, rng, opt);
}

CouplingOutput qtilde_to_ptilde(const ExperimentDraw& qtilde, const DrawShape& shape, RngStream& rng) {
  shape.validate();
  require_shape(qtilde, shape, Label::Qtilde, "qtilde_to_ptilde");
  return from_q_shape(qtilde, shape, shape.k1, Label::Ptilde, rng);
}

CouplingOutput regression_to_sequence(const ExperimentDraw& regression, const DrawShape& shape) {
  shape.validate();
  if (regression.label != Label::P && regression.label != Label::Pcheck) {
    throw std::invalid_argument("regression_to_sequence: expected P or Pcheck");
  }
  if (!(shape_of(regression) == shape) || regression.y.size() != shape.n()) {
    throw std::invalid_argument("regression_to_sequence: draw/shape mismatch");
  }
  CouplingOutput out;
  out.draw = regression;
  out.draw.label = regression.label == Label::P ? Label::Pbar : Label::Ptilde;
  out.draw.y.clear();
  const double inv = 1.0 / std::sqrt(static_cast<double>(shape.n()));
  std::vector<double> scaled(regression.y);
  for (auto& v : scaled) v *= inv;
  out.draw.coeffs = haar_analyze(scaled, shape.k0);
  return out;
}

CouplingOutput sequence_to_regression(const ExperimentDraw& sequence, const DrawShape& shape) {
  shape.validate();
  if (sequence.label != Label::Pbar && sequence.label != Label::Ptilde) {
    throw std::invalid_argument("sequence_to_regression: expected Pbar or Ptilde");
  }
  if (!(shape_of(sequence) == shape)) throw std::invalid_argument("sequence_to_regression: shape mismatch");
  CouplingOutput out;
  out.draw = sequence;
  out.draw.label = sequence.label == Label::Pbar ? Label::P : Label::Pcheck;
  out.draw.coeffs = HaarLadder{};
  out.draw.y = haar_synthesize(sequence.coeffs);
  const double scale = std::sqrt(static_cast<double>(shape.n()));
  for (auto& v : out.draw.y) v *= scale;
  return out;
}

std::vector<double> redistribute_variances(const std::vector<double>& vhat, const WeightTable& weights,
                                           const DrawShape& shape, RngStream& rng) {
  shape.validate();
  if (weights.m0 != shape.m0() || weights.m1 != shape.m1()) {
    throw std::invalid_argument("redistribute_variances: weight table does not match the shape");
  }
  if (vhat.size() != static_cast<std::size_t>(shape.m1())) {
    throw std::invalid_argument("redistribute_variances: need m1 statistics");
  }
  const double n = static_cast<double>(shape.n());
  const double m0 = shape.m0();
  const double m1 = shape.m1();
  const double shape_total = (n - m0) / (2.0 * m1);
  std::vector<double> vstar(static_cast<std::size_t>(shape.m0()), 0.0);
  for (std::size_t l = 0; l < weights.by_block.size(); ++l) {
    const auto& entries = weights.by_block[l];
    std::vector<double> alphas(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) alphas[e] = entries[e].delta * shape_total;
    const auto xi = draw_dirichlet(alphas, rng);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      vstar[static_cast<std::size_t>(entries[e].cell - 1)] += (m0 / m1) * xi[e] * vhat[l];
    }
  }
  return vstar;
}

std::vector<double> recombine_variances(const std::vector<double>& vstar, const DrawShape& shape) {
  shape.validate();
  if (vstar.size() != static_cast<std::size_t>(shape.m0())) {
    throw std::invalid_argument("recombine_variances: need m0 statistics");
  }
  const int q = shape.m0() / shape.m1();
  const double ratio = static_cast<double>(shape.m1()) / shape.m0();
  std::vector<double> out(static_cast<std::size_t>(shape.m1()));
  for (int l = 0; l < shape.m1(); ++l) {
    double acc = 0.0;
    for (int t = 0; t < q; ++t) acc += vstar[static_cast<std::size_t>(l * q + t)];
    out[static_cast<std::size_t>(l)] = ratio * acc;
  }
  return out;
}

std::vector<double> synthesize_regression(const std::vector<double>& top, const std::vector<double>& vstar,
                                          const DrawShape& shape, RngStream& rng) {
  shape.validate();
  const std::size_t m0 = static_cast<std::size_t>(shape.m0());
  if (top.size() != m0 || vstar.size() != m0) {
    throw std::invalid_argument("synthesize_regression: need m0 top coefficients and statistics");
  }
  const std::size_t n = shape.n();
  const std::size_t per_cell = n / m0;
  const double radius_factor = static_cast<double>(n - m0) / static_cast<double>(m0);
  HaarLadder ladder = make_zero_ladder(shape.k0, shape.k);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < m0; ++j) ladder.scaling[j] = root_n * top[j];
  for (std::size_t j = 0; j < m0; ++j) {
    if (!(vstar[j] > 0.0)) throw std::domain_error("synthesize_regression: statistics must be positive");
    const auto x = draw_conditional_gaussians(radius_factor * vstar[j], per_cell - 1, 1.0, rng);
    std::size_t next = 0;
    for (int i = shape.k0; i < shape.k; ++i) {
      auto& lv = ladder.level(i);
      const std::size_t width = std::size_t{1} << (i - shape.k0);
      for (std::size_t s = j * width; s < (j + 1) * width; ++s) lv[s] = x[next++];
    }
  }
  return haar_synthesize(ladder);
}

CouplingOutput ptilde_to_pcheck(const ExperimentDraw& ptilde, const DrawShape& shape, RngStream& rng) {
  shape.validate();
  require_shape(ptilde, shape, Label::Ptilde, "ptilde_to_pcheck");
  CouplingOutput out;
  out.vhat = block_vhat(ptilde.coeffs, shape, shape.k1, false);
  out.vstar = redistribute_variances(out.vhat, make_weight_table(shape.m0(), shape.m1()), shape, rng);
  out.draw = ptilde;
  out.draw.label = Label::Pcheck;
  out.draw.coeffs = HaarLadder{};
  out.draw.seed = rng.seed();
  out.draw.stream = rng.stream_id();
  out.draw.y = synthesize_regression(ptilde.coeffs.scaling, out.vstar, shape, rng);
  return out;
}

CouplingOutput pcheck_to_ptilde(const ExperimentDraw& pcheck, const DrawShape& shape, RngStream& rng) {
  shape.validate();
  require_shape(pcheck, shape, Label::Pcheck, "pcheck_to_ptilde");
  const std::size_t n = shape.n();
  const auto m0 = static_cast<std::size_t>(shape.m0());
  HaarLadder ladder = haar_analyze(pcheck.y, shape.k0);
  CouplingOutput out;
  out.vstar.assign(m0, 0.0);
  const double norm = static_cast<double>(m0) / static_cast<double>(n - m0);
  for (std::size_t j = 0; j < m0; ++j) {
    double acc = 0.0;
    for (int i = shape.k0; i < shape.k; ++i) {
      const auto& lv = ladder.level(i);
      const std::size_t width = std::size_t{1} << (i - shape.k0);
      for (std::size_t s = j * width; s < (j + 1) * width; ++s) acc += lv[s] * lv[s];
    }
    out.vstar[j] = norm * acc;
  }
  out.vhat = recombine_variances(out.vstar, shape);
  out.draw = pcheck;
  out.draw.label = Label::Ptilde;
  out.draw.y.clear();
  out.draw.seed = rng.seed();
  out.draw.stream = rng.stream_id();
  const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(n));
  HaarLadder seq = make_zero_ladder(shape.k0, shape.k);
  for (std::size_t j = 0; j < m0; ++j) seq.scaling[j] = ladder.scaling[j] * inv_root_n;
  std::vector<double> sd(out.vhat.size());
  for (std::size_t l = 0; l < sd.size(); ++l) sd[l] = std::sqrt(out.vhat[l] / static_cast<double>(n));
  for (int i = shape.k0; i < shape.k; ++i) {
    auto& lv = seq.level(i);
    for (std::size_t j = 0; j < lv.size(); ++j) {
      lv[j] = sd[static_cast<std::size_t>(coefficient_block(i, static_cast<int>(j), shape.k1) - 1)] * rng.normal();
    }
  }
  out.draw.coeffs = std::move(seq);
  return out;
}

double tau_hat_at(const std::vector<double>& knots, double t) {
  const std::size_t m1 = knots.size();
  if (m1 == 0) throw std::invalid_argument("tau_hat_at: no knots");
  const double u = t * static_cast<double>(m1) - 0.5;  // knot l sits at u = l - 1
  if (u <= 0.0) return knots.front();
  if (u >= static_cast<double>(m1 - 1)) return knots.back();
  const auto l = static_cast<std::size_t>(u);
  const double w = u - static_cast<double>(l);
  return (1.0 - w) * knots[l] + w * knots[l + 1];
}

CouplingOutput build_logvariance_process(const std::vector<double>& z, const DrawShape& shape,
                                         std::size_t cells, RngStream& rng, bool with_bridges) {
  shape.validate();
  const int m1 = shape.m1();
  if (m1 < 2) throw std::invalid_argument("build_logvariance_process: need m1 >= 2");
  if (z.size() != static_cast<std::size_t>(m1)) throw std::invalid_argument("build_logvariance_process: need m1 values");
  if (!is_dyadic(cells) || cells % (2 * static_cast<std::size_t>(m1)) != 0) {
    throw std::invalid_argument("build_logvariance_process: grid must refine the kernel supports");
  }
  for (double v : z) {
    if (!std::isfinite(v)) throw std::domain_error("build_logvariance_process: non-finite input");
  }
  CouplingOutput out;
  out.draw.label = Label::Qcheck;
  out.draw.k = shape.k;
  out.draw.k0 = shape.k0;
  out.draw.k1 = shape.k1;
  out.draw.seed = rng.seed();
  out.draw.stream = rng.stream_id();
  out.draw.dv.assign(cells, 0.0);
  out.tau_hat.assign(cells, 0.0);
  const double h = 1.0 / static_cast<double>(cells);
  const double noise = std::sqrt(2.0 / static_cast<double>(shape.n()) / m1);
  for (int ell = 1; ell <= m1; ++ell) {
    const double weight = z[static_cast<std::size_t>(ell - 1)] / m1;
    if (with_bridges) {
      const BridgeNoise b = draw_bridge_process(ell, m1, cells, rng);
      for (std::size_t g = 0; g < cells; ++g) {
        out.tau_hat[g] += weight * b.kernel_masses[g];
        out.draw.dv[g] += noise * b.increments[g];
      }
    } else {
      for (std::size_t g = 0; g < cells; ++g) {
        out.tau_hat[g] += weight * kernel_mass(ell, m1, g * h, (g + 1) * h);
      }
    }
  }
  for (std::size_t g = 0; g < cells; ++g) {
    out.draw.dv[g] += out.tau_hat[g];
    out.tau_hat[g] /= h;
  }
  return out;
}

}  // namespace eqlab
