#include "pontryagin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace pontryagin {
namespace {

GaussLegendreRule build_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton on P_n from the asymptotic root guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -z;
    rule.nodes[hi] = z;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  return rule;
}

std::complex<double> panel(const std::function<std::complex<double>(double)>& f, double lo, double hi,
                           const GaussLegendreRule& rule) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::complex<double> sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * sum;
}

std::complex<double> adaptive(const std::function<std::complex<double>(double)>& f, double lo, double hi,
                              std::complex<double> whole, double tol, int depth, const GaussLegendreRule& rule) {
  const double mid = 0.5 * (lo + hi);
  const std::complex<double> left = panel(f, lo, mid, rule);
  const std::complex<double> right = panel(f, mid, hi, rule);
  const std::complex<double> split = left + right;
  if (depth <= 0 || std::abs(split - whole) <= std::max(tol, 1e-15 * std::abs(split))) return split;
  return adaptive(f, lo, mid, left, tol, depth - 1, rule) + adaptive(f, mid, hi, right, tol, depth - 1, rule);
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  const std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(build_rule(n));
  return *slot;
}

std::complex<double> integrate_fixed(const std::function<std::complex<double>(double)>& f, double lo, double hi,
                                     int order) {
  return panel(f, lo, hi, gauss_legendre(order));
}

std::complex<double> integrate_adaptive(const std::function<std::complex<double>(double)>& f, double lo, double hi,
                                        double tol, int max_depth) {
  const GaussLegendreRule& rule = gauss_legendre(16);
  return adaptive(f, lo, hi, panel(f, lo, hi, rule), tol, max_depth, rule);
}

}  // namespace pontryagin
