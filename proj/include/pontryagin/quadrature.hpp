#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace pontryagin {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, computed once per n and cached.
const GaussLegendreRule& gauss_legendre(int n);

/// Fixed-order Gauss-Legendre integral of f over [lo, hi].
std::complex<double> integrate_fixed(const std::function<std::complex<double>(double)>& f, double lo, double hi,
                                     int order);

/// Adaptive bisection with a 16-point rule per panel; a panel is accepted
/// when it agrees with the sum of its halves to `tol` (absolute).
std::complex<double> integrate_adaptive(const std::function<std::complex<double>(double)>& f, double lo, double hi,
                                        double tol = 1e-13, int max_depth = 48);

}  // namespace pontryagin
