#pragma once

#include <functional>

namespace eqlab {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

// Globally adaptive Gauss-Kronrod (7/15) integration on a finite interval.
[[nodiscard]] QuadratureResult integrate(const std::function<double(double)>& f, double a,
                                         double b, const QuadratureOptions& opt = {});

}  // namespace eqlab
