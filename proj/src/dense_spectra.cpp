#include "pontryagin/dense_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "pontryagin/errors.hpp"

namespace pontryagin {
namespace {

template <typename Matrix>
void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected square");
  }
}

template <typename Matrix>
void require_hermitian(const Matrix& c, const char* who) {
  require_square(c, who);
  const double scale = max_abs(c);
  const double asym = max_abs(Matrix(c - c.adjoint()));
  if (asym > kDefaultTolerances.hermitian_check * scale) {
    throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian (||C - C*||_max = " +
                                std::to_string(asym) + ")");
  }
}

void check_info(lapack_int info, const char* routine) {
  if (info < 0) {
    throw std::invalid_argument(std::string(routine) + ": illegal argument " + std::to_string(-info));
  }
  if (info > 0) {
    throw NumericalError(std::string(routine) + " failed to converge (info = " + std::to_string(info) + ")");
  }
}

void normalize_columns(Eigen::MatrixXcd& v) {
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    auto col = v.col(k);
    const double norm = col.norm();
    if (norm == 0.0) continue;
    col /= norm;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      const double mag = std::abs(col(i));
      if (mag > 1e-12) {
        col *= std::conj(col(i)) / mag;
        col(i) = mag;
        break;
      }
    }
  }
}

void sort_pairs(GeneralEigenResult& r) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r.eigenvalues.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    const Complex a = r.eigenvalues(i);
    const Complex b = r.eigenvalues(j);
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  GeneralEigenResult sorted{Eigen::VectorXcd(r.eigenvalues.size()),
                            Eigen::MatrixXcd(r.eigenvectors.rows(), r.eigenvectors.cols())};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto dst = static_cast<Eigen::Index>(k);
    sorted.eigenvalues(dst) = r.eigenvalues(order[k]);
    if (r.eigenvectors.size() > 0) sorted.eigenvectors.col(dst) = r.eigenvectors.col(order[k]);
  }
  r = std::move(sorted);
}

void sort_values(Eigen::VectorXcd& v) {
  std::sort(v.data(), v.data() + v.size(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
}

// dgeev packs a conjugate pair (wr ± i wi) as two real columns (re, im).
GeneralEigenResult real_geev(const Eigen::MatrixXd& x, bool vectors) {
  require_square(x, "general_eig");
  const lapack_int n = static_cast<lapack_int>(x.rows());
  GeneralEigenResult out{Eigen::VectorXcd(n), Eigen::MatrixXcd()};
  if (n == 0) return out;
  Eigen::MatrixXd work = x;
  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd vr(vectors ? n : 1, vectors ? n : 1);
  check_info(LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, work.data(), n, wr.data(), wi.data(),
                           nullptr, 1, vr.data(), vectors ? n : 1),
             "dgeev");
  for (lapack_int k = 0; k < n; ++k) out.eigenvalues(k) = Complex(wr(k), wi(k));
  if (vectors) {
    out.eigenvectors.resize(n, n);
    for (lapack_int k = 0; k < n; ++k) {
      if (wi(k) == 0.0) {
        out.eigenvectors.col(k) = vr.col(k).cast<Complex>();
      } else if (wi(k) > 0.0 && k + 1 < n) {
        out.eigenvectors.col(k).real() = vr.col(k);
        out.eigenvectors.col(k).imag() = vr.col(k + 1);
        out.eigenvectors.col(k + 1) = out.eigenvectors.col(k).conjugate();
        ++k;
      }
    }
  }
  return out;
}

GeneralEigenResult complex_geev(const Eigen::MatrixXcd& x, bool vectors) {
  require_square(x, "general_eig");
  const lapack_int n = static_cast<lapack_int>(x.rows());
  GeneralEigenResult out{Eigen::VectorXcd(n), Eigen::MatrixXcd()};
  if (n == 0) return out;
  Eigen::MatrixXcd work = x;
  Eigen::MatrixXcd vr(vectors ? n : 1, vectors ? n : 1);
  check_info(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, work.data(), n, out.eigenvalues.data(),
                           nullptr, 1, vr.data(), vectors ? n : 1),
             "zgeev");
  if (vectors) out.eigenvectors = std::move(vr);
  return out;
}

}  // namespace

HermitianEigenResult hermitian_eig(const Eigen::MatrixXd& c) {
  require_hermitian(c, "hermitian_eig");
  const lapack_int n = static_cast<lapack_int>(c.rows());
  Eigen::MatrixXd v = c;
  Eigen::VectorXd w(n);
  if (n > 0) check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, v.data(), n, w.data()), "dsyevd");
  return {std::move(w), v.transpose().cast<Complex>()};
}

HermitianEigenResult hermitian_eig(const Eigen::MatrixXcd& c) {
  require_hermitian(c, "hermitian_eig");
  const lapack_int n = static_cast<lapack_int>(c.rows());
  Eigen::MatrixXcd v = c;
  Eigen::VectorXd w(n);
  if (n > 0) check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, v.data(), n, w.data()), "zheevd");
  return {std::move(w), v.adjoint()};
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXd& c) {
  require_hermitian(c, "hermitian_eigenvalues");
  const lapack_int n = static_cast<lapack_int>(c.rows());
  Eigen::MatrixXd v = c;
  Eigen::VectorXd w(n);
  if (n > 0) check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, v.data(), n, w.data()), "dsyevd");
  return w;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& c) {
  if (has_zero_imag(c)) return hermitian_eigenvalues(Eigen::MatrixXd(c.real()));
  require_hermitian(c, "hermitian_eigenvalues");
  const lapack_int n = static_cast<lapack_int>(c.rows());
  Eigen::MatrixXcd v = c;
  Eigen::VectorXd w(n);
  if (n > 0) check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, v.data(), n, w.data()), "zheevd");
  return w;
}

GeneralEigenResult general_eig(const Eigen::MatrixXd& x) {
  GeneralEigenResult r = real_geev(x, true);
  if (!pair_conjugates(r.eigenvalues, &r.eigenvectors, max_abs(x))) {
    throw NumericalError("general_eig: nonreal eigenvalues of a real matrix could not be paired");
  }
  normalize_columns(r.eigenvectors);
  sort_pairs(r);
  return r;
}

GeneralEigenResult general_eig(const Eigen::MatrixXcd& x) {
  GeneralEigenResult r = complex_geev(x, true);
  normalize_columns(r.eigenvectors);
  sort_pairs(r);
  return r;
}

Eigen::VectorXcd general_eigenvalues(const Eigen::MatrixXd& x) {
  GeneralEigenResult r = real_geev(x, false);
  if (!pair_conjugates(r.eigenvalues, nullptr, max_abs(x))) {
    throw NumericalError("general_eigenvalues: nonreal eigenvalues of a real matrix could not be paired");
  }
  sort_values(r.eigenvalues);
  return r.eigenvalues;
}

Eigen::VectorXcd general_eigenvalues(const Eigen::MatrixXcd& x) {
  GeneralEigenResult r = complex_geev(x, false);
  sort_values(r.eigenvalues);
  return r.eigenvalues;
}

bool pair_conjugates(Eigen::VectorXcd& eigenvalues, Eigen::MatrixXcd* vectors, double x_norm,
                     const Tolerances& tol) {
  const double snap = tol.real_snap * (1.0 + x_norm);
  std::vector<Eigen::Index> upper, lower;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    Complex& l = eigenvalues(k);
    if (std::abs(l.imag()) <= snap) {
      l = Complex(l.real(), 0.0);
    } else if (l.imag() > 0.0) {
      upper.push_back(k);
    } else {
      lower.push_back(k);
    }
  }
  std::vector<bool> used(lower.size(), false);
  for (const Eigen::Index p : upper) {
    std::size_t best = lower.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(eigenvalues(p) - std::conj(eigenvalues(lower[j])));
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best == lower.size()) return false;
    used[best] = true;
    const Eigen::Index q = lower[best];
    const Complex mid = 0.5 * (eigenvalues(p) + std::conj(eigenvalues(q)));
    eigenvalues(p) = mid;
    eigenvalues(q) = std::conj(mid);
    if (vectors != nullptr && vectors->size() > 0) vectors->col(q) = vectors->col(p).conjugate();
  }
  return upper.size() == lower.size();
}

double eig_residual(const Eigen::MatrixXcd& x, Complex lambda, const Eigen::VectorXcd& v) {
  if (x.rows() != x.cols() || x.cols() != v.size()) {
    throw std::invalid_argument("eig_residual: dimension mismatch");
  }
  const double norm = v.norm();
  if (norm == 0.0) throw std::invalid_argument("eig_residual: zero vector");
  return (x * v - lambda * v).norm() / norm;
}

TridiagonalForm tridiagonalize(const Eigen::MatrixXcd& c, const Eigen::VectorXcd& b) {
  require_hermitian(c, "tridiagonalize");
  if (b.size() != c.rows()) throw std::invalid_argument("tridiagonalize: b and C have inconsistent sizes");
  const lapack_int n = static_cast<lapack_int>(c.rows());
  TridiagonalForm t;
  t.d.resize(n);
  t.e.resize(std::max<lapack_int>(n - 1, 0));
  t.w = b;
  if (n == 0) return t;
  if (n == 1) {
    t.d(0) = c(0, 0).real();
    return t;
  }
  if (has_zero_imag(c)) {
    Eigen::MatrixXd a = c.real();
    Eigen::VectorXd tau(n - 1);
    check_info(LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, a.data(), n, t.d.data(), t.e.data(), tau.data()), "dsytrd");
    Eigen::MatrixXd rhs(n, 2);
    rhs.col(0) = b.real();
    rhs.col(1) = b.imag();
    check_info(LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'T', n, 2, a.data(), n, tau.data(), rhs.data(), n),
               "dormtr");
    for (lapack_int k = 0; k < n; ++k) t.w(k) = Complex(rhs(k, 0), rhs(k, 1));
    return t;
  }
  Eigen::MatrixXcd a = c;
  Eigen::VectorXcd tau(n - 1);
  check_info(LAPACKE_zhetrd(LAPACK_COL_MAJOR, 'L', n, a.data(), n, t.d.data(), t.e.data(), tau.data()), "zhetrd");
  check_info(LAPACKE_zunmtr(LAPACK_COL_MAJOR, 'L', 'L', 'C', n, 1, a.data(), n, tau.data(), t.w.data(), n), "zunmtr");
  return t;
}

Eigen::VectorXcd tridiagonal_solve(const TridiagonalForm& t, Complex z) {
  const lapack_int n = static_cast<lapack_int>(t.d.size());
  Eigen::VectorXcd y = t.w;
  if (n == 0) return y;
  Eigen::VectorXcd dl = t.e.cast<Complex>();
  Eigen::VectorXcd du = dl;
  Eigen::VectorXcd diag = t.d.cast<Complex>().array() - z;
  const lapack_int info = LAPACKE_zgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(), diag.data(), du.data(), y.data(), n);
  if (info > 0) throw std::invalid_argument("tridiagonal_solve: z is an eigenvalue");
  check_info(info, "zgtsv");
  return y;
}

Complex tridiagonal_quadratic_form(const TridiagonalForm& t, Complex z) {
  if (t.d.size() == 0) return 0.0;
  return t.w.dot(tridiagonal_solve(t, z));
}

}  // namespace pontryagin
