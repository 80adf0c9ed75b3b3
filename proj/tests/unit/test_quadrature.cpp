#include <doctest.h>

#include <cmath>

#include "pontryagin/quadrature.hpp"

using namespace pontryagin;

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    for (int n : {1, 2, 5, 16, 64, 256}) {
      const auto& rule = gauss_legendre(n);
      double wsum = 0.0;
      for (double w : rule.weights) wsum += w;
      CHECK(wsum == doctest::Approx(2.0).epsilon(1e-13));
      CHECK(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
      for (int p = 0; p <= 2 * n - 1 && p <= 30; ++p) {
        double s = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * std::pow(rule.nodes[k], p);
        const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
        CHECK(std::abs(s - exact) < 1e-13);
      }
    }
    CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  }

  TEST_CASE("fixed and adaptive integrals") {
    const auto f = [](double t) { return std::complex<double>(std::exp(t), 0.0); };
    CHECK(std::abs(integrate_fixed(f, 0, 1, 16) - (M_E - 1.0)) < 1e-14);
    // sqrt has an endpoint singularity in its derivative.
    const auto g = [](double t) { return std::complex<double>(std::sqrt(t), 0.0); };
    CHECK(std::abs(integrate_adaptive(g, 0, 1) - 2.0 / 3.0) < 1e-12);
    // near-pole integrand
    const std::complex<double> z(0.2, 1e-3);
    const auto h = [&](double t) { return 1.0 / (t - z); };
    const std::complex<double> exact = std::log((1.0 - z) / (-1.0 - z));
    CHECK(std::abs(integrate_adaptive(h, -1, 1) - exact) < 1e-10);
  }
}
