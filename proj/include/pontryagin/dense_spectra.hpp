#pragma once

#include <complex>

#include <Eigen/Dense>

#include "pontryagin/tolerances.hpp"

namespace pontryagin {

using Complex = std::complex<double>;

/// Eigenvalues sorted ascending; `basis` is the unitary U with U C U* diagonal,
/// so row k of U is the conjugate of the k-th eigenvector.
struct HermitianEigenResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd basis;
};

/// Column k of `eigenvectors` belongs to `eigenvalues[k]`. Columns have unit
/// Euclidean norm and their first nonzero component is real and nonnegative.
/// Pairs are ordered by (real part, imaginary part).
struct GeneralEigenResult {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};

HermitianEigenResult hermitian_eig(const Eigen::MatrixXd& c);
HermitianEigenResult hermitian_eig(const Eigen::MatrixXcd& c);

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXd& c);
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& c);

/// For real input the conjugate pairing post-pass is applied.
GeneralEigenResult general_eig(const Eigen::MatrixXd& x);
GeneralEigenResult general_eig(const Eigen::MatrixXcd& x);

Eigen::VectorXcd general_eigenvalues(const Eigen::MatrixXd& x);
Eigen::VectorXcd general_eigenvalues(const Eigen::MatrixXcd& x);

/// Snaps near-real eigenvalues onto the axis and symmetrizes the remaining ones
/// into exact conjugate pairs (nearest match). `x_norm` is ||X||_max. When
/// `vectors` is given, the partner of a pair receives the conjugated vector.
/// Returns false when the nonreal eigenvalues cannot be paired completely.
bool pair_conjugates(Eigen::VectorXcd& eigenvalues, Eigen::MatrixXcd* vectors, double x_norm,
                     const Tolerances& tol = kDefaultTolerances);

/// C = Q T Q* with T real symmetric tridiagonal (diagonal d, off-diagonal e);
/// `w` is Q* b for the vector b passed alongside C.
struct TridiagonalForm {
  Eigen::VectorXd d;
  Eigen::VectorXd e;
  Eigen::VectorXcd w;
};

TridiagonalForm tridiagonalize(const Eigen::MatrixXcd& c, const Eigen::VectorXcd& b);

/// (T - z)^{-1} w by a pivoted tridiagonal solve.
Eigen::VectorXcd tridiagonal_solve(const TridiagonalForm& t, Complex z);

/// w* (T - z)^{-1} w.
Complex tridiagonal_quadratic_form(const TridiagonalForm& t, Complex z);

/// ||X v - lambda v|| / ||v||.
double eig_residual(const Eigen::MatrixXcd& x, Complex lambda, const Eigen::VectorXcd& v);

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool has_zero_imag(const Eigen::MatrixBase<Derived>& m) {
  if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
    return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0;
  } else {
    return true;
  }
}

}  // namespace pontryagin
