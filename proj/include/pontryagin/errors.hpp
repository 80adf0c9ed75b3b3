#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pontryagin {

/// Raised when a numerical kernel cannot deliver a trustworthy answer
/// (LAPACK convergence failure, search exhaustion, unstable limits).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The nonpositive-type eigenvalue could not be singled out: zero or several
/// candidates survived the tolerance test. All candidates are kept.
class AmbiguousClassification : public NumericalError {
 public:
  AmbiguousClassification(const std::string& what, std::vector<std::complex<double>> candidates)
      : NumericalError(what), candidates_(std::move(candidates)) {}

  const std::vector<std::complex<double>>& candidates() const noexcept { return candidates_; }

 private:
  std::vector<std::complex<double>> candidates_;
};

class SearchFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pontryagin
