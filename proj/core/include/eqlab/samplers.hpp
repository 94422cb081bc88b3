#pragma once

#include <cstddef>
#include <vector>

#include "eqlab/rng.hpp"

namespace eqlab {

// Gamma(shape, scale); mean shape * scale. Marsaglia-Tsang, with the
// G(a + 1) U^(1/a) boost for shape < 1.
[[nodiscard]] double draw_gamma(double shape, double scale, RngStream& rng);

// log of a Gamma(shape, 1) variate; finite even when the variate itself
// would underflow (tiny shapes).
[[nodiscard]] double draw_log_gamma(double shape, RngStream& rng);

[[nodiscard]] std::vector<double> draw_dirichlet(const std::vector<double>& alphas,
                                                 RngStream& rng);

// Poisson(lambda / 2) mixture of chi-square(df + 2K); mean df + lambda.
[[nodiscard]] double draw_noncentral_chisq(double df, double lambda, RngStream& rng);

// `count` values uniform on the sphere { x : scale * sum x_i^2 = total }.
[[nodiscard]] std::vector<double> draw_conditional_gaussians(double total, std::size_t count,
                                                             double scale, RngStream& rng);
// Convenience form with scale = count.
[[nodiscard]] std::vector<double> draw_conditional_gaussians(double total, std::size_t count,
                                                             RngStream& rng);

// Reflected triangular kernel K_l on [0,1]: peak m1 at (2l - 1) / (2 m1),
// half-width 1 / m1, mass outside [0,1] folded back in. Unit integral.
[[nodiscard]] double kernel_value(int ell, int m1, double x);
// Integral of the reflected kernel over [u, v] within [0, 1].
[[nodiscard]] double kernel_mass(int ell, int m1, double u, double v);

struct BridgeNoise {
  int ell = 0;
  int m1 = 0;
  std::size_t cells = 0;
  // Cell masses of K_l; they sum to one.
  std::vector<double> kernel_masses;
  // Bridge increments on the grid; they sum to zero.
  std::vector<double> increments;
};

// K_l-Brownian bridge increments on a uniform grid of `cells` cells. Built
// from independent N(0, kappa_g) cell values c_g as b_g = c_g - kappa_g sum c.
// `cells` must be a multiple of 2 m1.
[[nodiscard]] BridgeNoise draw_bridge_process(int ell, int m1, std::size_t cells,
                                              RngStream& rng);

}  // namespace eqlab
