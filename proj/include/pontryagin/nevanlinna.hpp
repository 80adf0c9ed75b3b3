#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pontryagin/dense_spectra.hpp"
#include "pontryagin/tolerances.hpp"

namespace pontryagin {

/// sum_k weights[k] * delta_{atoms[k]}; weights strictly positive. The empty
/// measure is legal and stands for mu = 0.
struct DiscreteMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;

  double mass() const;
  void validate() const;
};

/// A measure with a density; semicircle and poly_cubic have mass one.
struct AbsContMeasure {
  enum class Kind { semicircle, poly_cubic, custom };

  Kind kind = Kind::semicircle;
  double s = 1.0;  // semicircle: density sqrt(4s^2 - t^2) / (2 pi s^2) on [-2s, 2s]
  std::function<double(double)> density;  // custom only
  double lo = -1.0;
  double hi = 1.0;
  int order = 256;
  double custom_mass = 0.0;

  static AbsContMeasure semicircle(double s);
  /// Density 3t^2/2 on [-1, 1].
  static AbsContMeasure poly_cubic();
  static AbsContMeasure custom(std::function<double(double)> density, double lo, double hi, int order = 256);

  double lower() const;
  double upper() const;
  double density_at(double t) const;
};

using SpectralMeasure = std::variant<DiscreteMeasure, AbsContMeasure>;

double total_mass(const SpectralMeasure& mu);
/// max |t| over the support (0 for the empty measure).
double support_radius(const SpectralMeasure& mu);
/// Normalized distribution function mu((-inf, x]) / mu(R).
double cdf(const SpectralMeasure& mu, double x);

/// mu^(z) = int dmu(t) / (t - z). Rejects z on the support of a density or at an atom.
Complex stieltjes(const SpectralMeasure& mu, Complex z);
Complex stieltjes_derivative(const SpectralMeasure& mu, Complex z);

/// Q(z) = a - z + s2 * mu^(z).
struct N1Function {
  double a = 0.0;
  double s2 = 1.0;
  SpectralMeasure measure = DiscreteMeasure{};

  /// 1 + |a| + s2 * mass + support radius.
  double scale() const;
};

Complex q_eval(const N1Function& q, Complex z);
Complex q_deriv(const N1Function& q, Complex z);

enum class GzntKind { interior, real };

std::string_view to_string(GzntKind kind);

struct Gznt {
  Complex point;
  GzntKind kind = GzntKind::interior;
  /// Nontangential limit of Q(z) / (z - z0) for real z0.
  std::optional<double> limit_value;
};

/// Atoms are the eigenvalues of C, weights |(U b)_j|^2 (tiny weights dropped).
DiscreteMeasure spectral_measure_of_pair(const Eigen::VectorXcd& b, const Eigen::MatrixXcd& c);

/// Empirical spectral distribution: every eigenvalue of C with weight 1/N.
DiscreteMeasure esd(const Eigen::MatrixXcd& c);
DiscreteMeasure esd(const Eigen::MatrixXd& c);

/// b* (C - z)^{-1} b by a direct linear solve.
Complex quadratic_resolvent(const Eigen::VectorXcd& b, const Eigen::MatrixXcd& c, Complex z);

/// GZNT through the eigenvalue of nonpositive type of the companion block
/// (a, sqrt(s2 w), diag(atoms)).
Gznt gznt_discrete(const N1Function& q, const Tolerances& tol = kDefaultTolerances);

/// GZNT from Q alone: damped Newton from a ladder of starts on the imaginary
/// axis, then a search for real zeros of nonpositive type off the support,
/// then a scan of the support through the nontangential limit.
Gznt gznt_newton(const N1Function& q, const Tolerances& tol = kDefaultTolerances);

/// Richardson-extrapolated real part of Q(x0 + i eta) / (i eta), eta = 1e-2 ... 1e-6.
double real_gznt_limit(const N1Function& q, double x0, const Tolerances& tol = kDefaultTolerances);

/// Number of eigenvalues of the kernel matrix [(Q(z_i) - conj Q(z_j)) / (z_i - conj z_j)]
/// lying at or below -tol * ||N||_max.
int negative_squares(const std::function<Complex(Complex)>& q, std::span<const Complex> points, double tol = 1e-10);
int negative_squares(const N1Function& q, std::span<const Complex> points, double tol = 1e-10);

nlohmann::json measure_to_json(const SpectralMeasure& mu);
/// Strict: unknown kinds or fields throw std::invalid_argument.
SpectralMeasure measure_from_json(const nlohmann::json& j);

}  // namespace pontryagin
