#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pontryagin/dense_spectra.hpp"
#include "pontryagin/tolerances.hpp"

namespace pontryagin {

/// H = diag(-1, I_n), acting on C^{n+1}.
struct SignatureMatrix {
  std::size_t n = 0;

  std::size_t dim() const { return n + 1; }
  Eigen::MatrixXd dense() const;
};

/// X = [[a, -b*], [b, C]] with real a and Hermitian C. An empty b/C is the
/// 1x1 matrix X = [a].
struct BlockHSelfAdjoint {
  double a = 0.0;
  Eigen::VectorXcd b;
  Eigen::MatrixXcd c;

  std::size_t n() const { return static_cast<std::size_t>(b.size()); }
  SignatureMatrix signature() const { return {n()}; }
  bool is_real() const { return has_zero_imag(b) && has_zero_imag(c); }

  /// Throws std::invalid_argument on inconsistent sizes or non-Hermitian C.
  void validate() const;
};

enum class CaseLabel { case1 = 1, case2 = 2, case3 = 3, case4 = 4 };

std::string_view to_string(CaseLabel label);

struct CanonicalCase {
  CaseLabel label = CaseLabel::case2;
  Complex beta;
  int multiplicity = 1;
};

/// Real eigenvalues of X outside the Jordan chain of beta, sorted ascending.
struct RealSpectrum {
  std::vector<double> zeta;
};

/// Everything one eigendecomposition of X tells us, computed once.
struct SpectralAnalysis {
  CanonicalCase canonical;
  std::vector<double> zeta;
  Eigen::VectorXcd eigenvalues;  // full spectrum of X, conjugate-paired
  double x_norm = 0.0;           // ||X||_max
};

Complex h_inner(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y, const SignatureMatrix& h);

Eigen::MatrixXcd assemble(const BlockHSelfAdjoint& m);
/// Real-valued assembly; throws if b or C carry imaginary parts.
Eigen::MatrixXd assemble_real(const BlockHSelfAdjoint& m);

bool is_h_selfadjoint(const Eigen::MatrixXcd& x, const SignatureMatrix& h, double tol);

/// Locates the unique eigenvalue of nonpositive type, classifies its Jordan
/// structure and splits off the remaining real spectrum.
///
/// Eigenvalues closer than the cluster radius are merged; a cluster's vector is
/// the solver's eigenvector when simple, otherwise one step of inverse iteration
/// at the cluster centroid. A cluster in the closed upper half-plane whose unit
/// vector has [v,v]_H <= tol.nonpositive is a candidate; anything other than
/// exactly one candidate raises AmbiguousClassification.
SpectralAnalysis analyze_spectrum(const BlockHSelfAdjoint& m, const Tolerances& tol = kDefaultTolerances);

CanonicalCase nonpositive_type_eigenvalue(const BlockHSelfAdjoint& m, const Tolerances& tol = kDefaultTolerances);
CanonicalCase classify_canonical_case(const BlockHSelfAdjoint& m, const Tolerances& tol = kDefaultTolerances);
RealSpectrum real_spectrum(const BlockHSelfAdjoint& m, const Tolerances& tol = kDefaultTolerances);

/// e1* H (X - z)^{-1} e1, which equals -1/Q(z) for Q(z) = a - z + b*(C - z)^{-1} b.
Complex scalar_resolvent(const BlockHSelfAdjoint& m, Complex z, const Tolerances& tol = kDefaultTolerances);

}  // namespace pontryagin
