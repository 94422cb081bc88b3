#pragma once

#include <cstddef>
#include <vector>

#include "eqlab/experiments.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/weights.hpp"

namespace eqlab {

// The only information a coupling may use besides the observations: sizes.
// Mean, variance and fixture choices never enter a transformation.
struct DrawShape {
  int k = 0;
  int k0 = 0;
  int k1 = 0;
  [[nodiscard]] std::size_t n() const { return std::size_t{1} << k; }
  [[nodiscard]] int m0() const { return 1 << k0; }
  [[nodiscard]] int m1() const { return 1 << k1; }
  void validate() const;
  bool operator==(const DrawShape&) const = default;
};

[[nodiscard]] DrawShape shape_of(const ModelSpec& spec);
[[nodiscard]] DrawShape shape_of(const ExperimentDraw& draw);

struct CouplingOutput {
  ExperimentDraw draw;          // target-shaped observation
  std::vector<double> vhat;     // V-hat (one entry) or V-hat_l (m1 entries)
  std::vector<double> vstar;    // V*_j, m0 entries, when produced
  std::vector<double> tau_hat;  // drift cell averages, when produced
  std::vector<double> aux;      // extra randomness actually consumed
};

struct CouplingOptions {
  // Regression guard: drop the n m1 / (n - m0) normalizer of V-hat.
  bool skip_normalizer = false;
};

// Pbar -> Q: V-hat = n / (n - m) sum X_ij^2 over the wavelet levels; top
// coefficients kept; wavelets redrawn as N(0, V-hat / n).
[[nodiscard]] CouplingOutput pbar_to_q(const ExperimentDraw& pbar, const DrawShape& shape,
                                       RngStream& rng, const CouplingOptions& opt = {});
// Q -> Pbar: top coefficients kept; wavelets are the first n - m coordinates
// of a uniform point on { n sum x^2 = n V }.
[[nodiscard]] CouplingOutput q_to_pbar(const ExperimentDraw& q, const DrawShape& shape,
                                       RngStream& rng);

// Blockwise versions; m1 = 1 reproduces the two maps above bit for bit.
[[nodiscard]] CouplingOutput ptilde_to_qtilde(const ExperimentDraw& ptilde, const DrawShape& shape,
                                              RngStream& rng, const CouplingOptions& opt = {});
[[nodiscard]] CouplingOutput qtilde_to_ptilde(const ExperimentDraw& qtilde, const DrawShape& shape,
                                              RngStream& rng);

// Orthonormal cascade between design-point samples and sequence
// coefficients (scaled by 1/sqrt(n)); deterministic and invertible.
[[nodiscard]] CouplingOutput regression_to_sequence(const ExperimentDraw& regression,
                                                    const DrawShape& shape);
[[nodiscard]] CouplingOutput sequence_to_regression(const ExperimentDraw& sequence,
                                                    const DrawShape& shape);

// V*_j = (m0 / m1) sum over the blocks sharing cell j of xi_lj V-hat_l, with
// xi_l. ~ Dirichlet(delta_lj (n - m0) / (2 m1)).
[[nodiscard]] std::vector<double> redistribute_variances(const std::vector<double>& vhat,
                                                         const WeightTable& weights,
                                                         const DrawShape& shape, RngStream& rng);
// (m1 / m0) sum_{j in J_l} V*_j.
[[nodiscard]] std::vector<double> recombine_variances(const std::vector<double>& vstar,
                                                      const DrawShape& shape);

// Regression-scale samples: per cell j, n/m0 - 1 wavelets uniform on the
// sphere of squared radius (n - m0)/m0 V*_j, scaling sqrt(n) top_j, then the
// inverse cascade.
[[nodiscard]] std::vector<double> synthesize_regression(const std::vector<double>& top,
                                                        const std::vector<double>& vstar,
                                                        const DrawShape& shape, RngStream& rng);

// Ptilde -> Pcheck through V-hat_l, the Dirichlet redistribution and the
// synthesis above; and the reverse through cell statistics and
// recombination.
[[nodiscard]] CouplingOutput ptilde_to_pcheck(const ExperimentDraw& ptilde, const DrawShape& shape,
                                              RngStream& rng);
[[nodiscard]] CouplingOutput pcheck_to_ptilde(const ExperimentDraw& pcheck, const DrawShape& shape,
                                              RngStream& rng);

// Piecewise-linear interpolation through (t*_l, knots_l), t*_l = (2l - 1)/(2 m1),
// constant outside the extreme knots.
[[nodiscard]] double tau_hat_at(const std::vector<double>& knots, double t);

// dV*(t) = sum_l z_l K_l(t) / m1 dt + sqrt(2 / n) sum_l m1^(-1/2) dB_l(t) on a
// uniform grid of `cells` cells. Result: draw.dv holds the increments and
// tau_hat the drift cell averages. `with_bridges = false` gives the drift
// alone.
[[nodiscard]] CouplingOutput build_logvariance_process(const std::vector<double>& z,
                                                       const DrawShape& shape, std::size_t cells,
                                                       RngStream& rng, bool with_bridges = true);

}  // namespace eqlab
