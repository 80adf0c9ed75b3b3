#include "pontryagin/indefinite_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "pontryagin/errors.hpp"

namespace pontryagin {
namespace {

double h_norm_unit(const Eigen::VectorXcd& v) {
  const double total = v.squaredNorm();
  if (total == 0.0) return 0.0;
  return (total - 2.0 * std::norm(v(0))) / total;
}

// Disjoint-set forest for single-linkage clustering.
struct Clusters {
  std::vector<std::size_t> parent;

  explicit Clusters(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }

  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void join(std::size_t i, std::size_t j) {
    i = find(i);
    j = find(j);
    if (i != j) parent[std::max(i, j)] = std::min(i, j);
  }
};

std::vector<std::vector<Eigen::Index>> cluster_eigenvalues(const Eigen::VectorXcd& ev, double radius) {
  const auto n = static_cast<std::size_t>(ev.size());
  std::vector<Eigen::Index> by_real(n);
  std::iota(by_real.begin(), by_real.end(), Eigen::Index{0});
  std::sort(by_real.begin(), by_real.end(), [&](Eigen::Index i, Eigen::Index j) { return ev(i).real() < ev(j).real(); });

  Clusters sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n && ev(by_real[j]).real() - ev(by_real[i]).real() <= radius; ++j) {
      if (std::abs(ev(by_real[i]) - ev(by_real[j])) <= radius) {
        sets.join(static_cast<std::size_t>(by_real[i]), static_cast<std::size_t>(by_real[j]));
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t root = sets.find(k);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[root])].push_back(static_cast<Eigen::Index>(k));
  }
  return groups;
}

// Smallest right singular vector of X - centroid. The centroid of a perturbed
// Jordan block is accurate to rounding, so this is the eigenvector.
Eigen::VectorXcd cluster_vector(const Eigen::MatrixXcd& x, Complex centroid) {
  Eigen::MatrixXcd shifted = x;
  shifted.diagonal().array() -= centroid;
  const Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
  const Eigen::VectorXcd v = svd.matrixV().col(x.cols() - 1);
  if (!v.allFinite()) throw NumericalError("singular vector at a cluster is not finite");
  return v;
}

std::string describe(const std::vector<Complex>& candidates) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    os << (k ? ", " : "") << candidates[k].real() << (candidates[k].imag() < 0 ? "-" : "+")
       << std::abs(candidates[k].imag()) << "i";
  }
  return os.str();
}

}  // namespace

Eigen::MatrixXd SignatureMatrix::dense() const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
  h(0, 0) = -1.0;
  return h;
}

void BlockHSelfAdjoint::validate() const {
  if (c.rows() != c.cols() || c.rows() != b.size()) {
    throw std::invalid_argument("BlockHSelfAdjoint: b has length " + std::to_string(b.size()) + " but C is " +
                                std::to_string(c.rows()) + "x" + std::to_string(c.cols()));
  }
  if (!std::isfinite(a)) throw std::invalid_argument("BlockHSelfAdjoint: a is not finite");
  if (max_abs(Eigen::MatrixXcd(c - c.adjoint())) > kDefaultTolerances.hermitian_check * std::max(1.0, max_abs(c))) {
    throw std::invalid_argument("BlockHSelfAdjoint: C is not Hermitian");
  }
}

std::string_view to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::case1: return "Case1";
    case CaseLabel::case2: return "Case2";
    case CaseLabel::case3: return "Case3";
    case CaseLabel::case4: return "Case4";
  }
  return "?";
}

Complex h_inner(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y, const SignatureMatrix& h) {
  const auto dim = static_cast<Eigen::Index>(h.dim());
  if (x.size() != dim || y.size() != dim) {
    throw std::invalid_argument("h_inner: vectors must have length " + std::to_string(dim));
  }
  // y* H x
  return y.dot(x) - 2.0 * std::conj(y(0)) * x(0);
}

Eigen::MatrixXcd assemble(const BlockHSelfAdjoint& m) {
  m.validate();
  const Eigen::Index n = m.b.size();
  Eigen::MatrixXcd x(n + 1, n + 1);
  x(0, 0) = m.a;
  x.block(0, 1, 1, n) = -m.b.adjoint();
  x.block(1, 0, n, 1) = m.b;
  x.block(1, 1, n, n) = m.c;
  return x;
}

Eigen::MatrixXd assemble_real(const BlockHSelfAdjoint& m) {
  m.validate();
  if (!m.is_real()) throw std::invalid_argument("assemble_real: block has complex entries");
  const Eigen::Index n = m.b.size();
  Eigen::MatrixXd x(n + 1, n + 1);
  x(0, 0) = m.a;
  x.block(0, 1, 1, n) = -m.b.real().transpose();
  x.block(1, 0, n, 1) = m.b.real();
  x.block(1, 1, n, n) = m.c.real();
  return x;
}

bool is_h_selfadjoint(const Eigen::MatrixXcd& x, const SignatureMatrix& h, double tol) {
  const auto dim = static_cast<Eigen::Index>(h.dim());
  if (x.rows() != dim || x.cols() != dim) {
    throw std::invalid_argument("is_h_selfadjoint: matrix size does not match H");
  }
  const Eigen::MatrixXd hd = h.dense();
  const Eigen::MatrixXcd defect = x.adjoint() * hd - hd * x;
  return max_abs(defect) <= tol * (1.0 + max_abs(x));
}

namespace {

struct Candidate {
  std::size_t group;
  Complex centroid;
};

std::vector<Complex> centroids_of(const std::vector<Candidate>& cs) {
  std::vector<Complex> out;
  for (const auto& c : cs) out.push_back(c.centroid);
  return out;
}

struct Selection {
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Complex> centroids;
  std::vector<Candidate> candidates;
  std::vector<Candidate> first_candidates;
};

// h_norm(group, centroid) is [v,v]_H for a unit eigenvector of the group.
template <class HNorm>
Selection select_candidates(const Eigen::VectorXcd& ev, double x_norm, const Tolerances& tol, int levels,
                            HNorm h_norm) {
  // A perturbed Jordan chain of length m spreads over ~ eps^(1/m); widen the
  // clustering radius until exactly one candidate is left.
  Selection sel;
  double radius = tol.cluster_radius(x_norm);
  for (int level = 0; level < levels; ++level, radius *= tol.cluster_growth) {
    sel.groups = cluster_eigenvalues(ev, radius);
    sel.centroids.assign(sel.groups.size(), Complex{});
    sel.candidates.clear();
    for (std::size_t g = 0; g < sel.groups.size(); ++g) {
      Complex sum = 0.0;
      for (const Eigen::Index k : sel.groups[g]) sum += ev(k);
      const Complex centroid = sum / static_cast<double>(sel.groups[g].size());
      sel.centroids[g] = centroid;
      if (centroid.imag() < 0.0) continue;
      if (h_norm(sel.groups[g], centroid) <= tol.nonpositive) sel.candidates.push_back({g, centroid});
    }
    if (level == 0) sel.first_candidates = sel.candidates;
    if (sel.candidates.size() == 1) break;
  }
  return sel;
}

SpectralAnalysis finish(const BlockHSelfAdjoint& m, Selection& sel, Eigen::VectorXcd eigenvalues, double x_norm) {
  if (sel.candidates.size() != 1) {
    throw AmbiguousClassification("ambiguous classification: " + std::to_string(sel.first_candidates.size()) +
                                      " nonpositive-type candidates [" + describe(centroids_of(sel.first_candidates)) +
                                      "]",
                                  centroids_of(sel.first_candidates));
  }
  const Candidate chosen = sel.candidates.front();
  const auto multiplicity = static_cast<int>(sel.groups[chosen.group].size());
  CanonicalCase canonical;
  canonical.multiplicity = multiplicity;
  if (chosen.centroid.imag() > 0.0) {
    if (multiplicity != 1) {
      throw AmbiguousClassification("ambiguous classification: nonreal cluster of size " + std::to_string(multiplicity),
                                    centroids_of(sel.candidates));
    }
    canonical.label = CaseLabel::case1;
    canonical.beta = chosen.centroid;
  } else {
    if (multiplicity > 3) {
      throw AmbiguousClassification("ambiguous classification: real cluster of size " + std::to_string(multiplicity),
                                    centroids_of(sel.candidates));
    }
    canonical.label = static_cast<CaseLabel>(multiplicity + 1);
    canonical.beta = Complex(chosen.centroid.real(), 0.0);
  }

  SpectralAnalysis out;
  out.canonical = canonical;
  out.x_norm = x_norm;
  for (std::size_t g = 0; g < sel.groups.size(); ++g) {
    if (g == chosen.group || sel.centroids[g].imag() != 0.0) continue;
    for (const Eigen::Index k : sel.groups[g]) out.zeta.push_back(eigenvalues(k).real());
  }
  std::sort(out.zeta.begin(), out.zeta.end());

  const std::size_t chain = canonical.label == CaseLabel::case1 ? 2 : static_cast<std::size_t>(multiplicity);
  if (out.zeta.size() + chain != m.n() + 1) {
    std::vector<Complex> nonreal;
    for (std::size_t g = 0; g < sel.groups.size(); ++g) {
      if (sel.centroids[g].imag() != 0.0) nonreal.push_back(sel.centroids[g]);
    }
    throw AmbiguousClassification("ambiguous classification: unexpected nonreal eigenvalues [" + describe(nonreal) + "]",
                                  nonreal);
  }
  out.eigenvalues = std::move(eigenvalues);
  return out;
}

struct FastPathMiss {};

// Eigenvalues only. For an eigenvalue l the eigenvector is (1, -(C - l)^{-1} b),
// so [v,v]_H / |v|^2 = (|u|^2 - 1) / (|u|^2 + 1) with u from one tridiagonal solve.
std::optional<SpectralAnalysis> analyze_fast(const BlockHSelfAdjoint& m, const Eigen::MatrixXcd& x, double x_norm,
                                             const Tolerances& tol) {
  if (m.n() == 0) return std::nullopt;
  Eigen::VectorXcd ev = m.is_real() ? general_eigenvalues(assemble_real(m)) : general_eigenvalues(x);
  if (!m.is_real() && !pair_conjugates(ev, nullptr, x_norm, tol)) return std::nullopt;
  const TridiagonalForm tri = tridiagonalize(m.c, m.b);
  try {
    Selection sel = select_candidates(ev, x_norm, tol, 1, [&](const std::vector<Eigen::Index>& group, Complex l) {
      if (group.size() != 1) throw FastPathMiss{};
      const double u2 = tridiagonal_solve(tri, l).squaredNorm();
      if (!std::isfinite(u2)) throw FastPathMiss{};
      return (u2 - 1.0) / (u2 + 1.0);
    });
    if (sel.candidates.size() != 1) return std::nullopt;
    return finish(m, sel, std::move(ev), x_norm);
  } catch (const FastPathMiss&) {
    return std::nullopt;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  } catch (const AmbiguousClassification&) {
    return std::nullopt;
  }
}

}  // namespace

SpectralAnalysis analyze_spectrum(const BlockHSelfAdjoint& m, const Tolerances& tol) {
  m.validate();
  const Eigen::MatrixXcd x = assemble(m);
  const double x_norm = max_abs(x);
  if (auto fast = analyze_fast(m, x, x_norm, tol)) return std::move(*fast);

  GeneralEigenResult eig;
  if (m.is_real()) {
    eig = general_eig(assemble_real(m));
  } else {
    eig = general_eig(x);
    // The spectrum of an H-selfadjoint matrix is symmetric about the real axis.
    if (!pair_conjugates(eig.eigenvalues, nullptr, x_norm, tol)) {
      throw AmbiguousClassification("spectrum is not symmetric about the real axis",
                                    {eig.eigenvalues.data(), eig.eigenvalues.data() + eig.eigenvalues.size()});
    }
  }
  Selection sel = select_candidates(eig.eigenvalues, x_norm, tol, tol.cluster_levels,
                                    [&](const std::vector<Eigen::Index>& group, Complex centroid) {
                                      const Eigen::VectorXcd v = group.size() == 1
                                                                     ? Eigen::VectorXcd(eig.eigenvectors.col(group.front()))
                                                                     : cluster_vector(x, centroid);
                                      return h_norm_unit(v);
                                    });
  return finish(m, sel, std::move(eig.eigenvalues), x_norm);
}

CanonicalCase nonpositive_type_eigenvalue(const BlockHSelfAdjoint& m, const Tolerances& tol) {
  return analyze_spectrum(m, tol).canonical;
}

CanonicalCase classify_canonical_case(const BlockHSelfAdjoint& m, const Tolerances& tol) {
  return analyze_spectrum(m, tol).canonical;
}

RealSpectrum real_spectrum(const BlockHSelfAdjoint& m, const Tolerances& tol) {
  return {analyze_spectrum(m, tol).zeta};
}

Complex scalar_resolvent(const BlockHSelfAdjoint& m, Complex z, const Tolerances& tol) {
  const Eigen::MatrixXcd x = assemble(m);
  const double x_norm = max_abs(x);
  const Eigen::VectorXcd spectrum = m.is_real() ? general_eigenvalues(assemble_real(m)) : general_eigenvalues(x);
  const double gap = (spectrum.array() - z).abs().minCoeff();
  if (!(gap > tol.resolvent_gap * x_norm) || gap == 0.0) {
    throw std::invalid_argument("scalar_resolvent: z is too close to the spectrum of X");
  }
  Eigen::MatrixXcd shifted = x;
  shifted.diagonal().array() -= z;
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(x.rows());
  e1(0) = 1.0;
  const Eigen::VectorXcd w = Eigen::PartialPivLU<Eigen::MatrixXcd>(shifted).solve(e1);
  return -w(0);
}

}  // namespace pontryagin
