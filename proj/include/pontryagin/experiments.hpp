#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pontryagin/ensembles.hpp"
#include "pontryagin/indefinite_core.hpp"
#include "pontryagin/nevanlinna.hpp"

namespace pontryagin {

struct TrialRecord {
  EnsembleSpec spec;
  std::uint64_t trial = 0;
  Complex beta;
  CaseLabel label = CaseLabel::case2;
  int multiplicity = 1;
  std::vector<double> zeta;
  std::vector<double> lambda;  // eigenvalues of C, ascending
  double x_norm = 0.0;
  double elapsed = 0.0;        // seconds; never serialized
  std::optional<std::string> error;
  bool ambiguous = false;
  Eigen::VectorXcd spectrum;   // filled when RunOptions::keep_spectrum

  bool ok() const { return !error.has_value(); }
};

struct RunOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  bool keep_spectrum = false;
  bool compute_lambda = true;
  Tolerances tol = kDefaultTolerances;
};

unsigned resolve_threads(unsigned requested);

/// Classifies one block and fills a record; classification failures are caught
/// and recorded.
TrialRecord analyze_block(const BlockHSelfAdjoint& m, const EnsembleSpec& spec, std::uint64_t trial,
                          const RunOptions& options = {});

using TrialSampler = std::function<BlockHSelfAdjoint(std::uint64_t trial)>;

/// Records come back in trial order whatever the schedule.
std::vector<TrialRecord> run_trials(const EnsembleSpec& spec, std::size_t trials, const RunOptions& options = {});
std::vector<TrialRecord> run_trials(const TrialSampler& sampler, const EnsembleSpec& spec, std::size_t trials,
                                    const RunOptions& options = {});

/// Runs f(0) ... f(count - 1) on a pool of worker threads.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f);

struct BatchSummary {
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::size_t ambiguous = 0;
  std::array<std::size_t, 4> case_counts{};
  /// More than 2% ambiguous trials.
  bool failed() const { return trials > 0 && 50 * ambiguous > trials; }
};

BatchSummary summarize(const std::vector<TrialRecord>& records);

struct ConvergenceReport {
  EnsembleSpec spec;
  std::vector<std::size_t> sizes;
  double eps = 0.0;
  Complex beta0;
  std::size_t trials = 0;
  std::vector<std::size_t> within;
  std::vector<std::size_t> valid;
  std::vector<double> fraction_within;
  std::vector<BatchSummary> batches;
};

/// Fraction of trials with |beta_N - beta0| < eps per size; beta0 from
/// gznt_newton of the model's limit function.
ConvergenceReport convergence_in_probability(const EnsembleSpec& spec, const std::vector<std::size_t>& sizes,
                                             double eps, std::size_t trials, const RunOptions& options = {});

/// nullopt for records that are not Case1 or failed. Throws std::logic_error on
/// inconsistent lengths.
std::optional<bool> interlacing_check(const TrialRecord& record);

struct InterlaceReport {
  std::size_t trials = 0;
  std::size_t case1_count = 0;
  std::size_t interlaced_count = 0;
  std::size_t failures = 0;
};

InterlaceReport aggregate_interlacing(const std::vector<TrialRecord>& records);

using Cdf = std::function<double(double)>;

/// sup |F_emp - F| over the samples and a grid of `grid` points on [lo, hi].
double ks_distance(const std::vector<double>& sorted_samples, const Cdf& target, double lo, double hi,
                   std::size_t grid = 10000);

struct KSReport {
  std::size_t n_samples = 0;
  double distance = 0.0;
  std::string target;
};

struct EsdReport {
  EnsembleSpec spec;
  std::uint64_t trial = 0;
  KSReport zeta;    // real eigenvalues of X outside beta's chain
  KSReport lambda;  // eigenvalues of C
  CaseLabel label = CaseLabel::case2;
};

/// Limit law of the C block of the model (semicircle or the poly_cubic law).
SpectralMeasure limit_measure(const EnsembleSpec& spec);
std::string describe(const SpectralMeasure& mu);

EsdReport esd_experiment(const EnsembleSpec& spec, std::uint64_t trial = 0, const RunOptions& options = {});

struct ResolventReport {
  EnsembleSpec spec;
  Complex z;
  Complex target;
  std::vector<std::size_t> sizes;
  std::size_t trials = 0;
  std::vector<Complex> mean;            // mean of b*(C - z)^{-1} b
  std::vector<Complex> mean_deviation;  // mean - target
  std::vector<double> mean_abs_deviation;
  std::vector<std::vector<Complex>> samples;
};

/// b_N* (C_N - z)^{-1} b_N against s^2 mu0^(z) across sizes.
ResolventReport resolvent_concentration(const EnsembleSpec& spec, Complex z, const std::vector<std::size_t>& sizes,
                                        std::size_t trials, const RunOptions& options = {});

struct ContinuityReport {
  Gznt base;
  double scale = 0.0;
  std::size_t perturbations = 0;
  std::vector<double> displacement;
  double max_displacement = 0.0;
  double modulus = 1e-3;
  std::size_t failures = 0;

  bool within_modulus() const { return max_displacement <= modulus; }
};

/// GZNT displacement under random perturbations with ||dw||_1 + |da| = scale.
ContinuityReport continuity_probe(const DiscreteMeasure& mu, double a, double scale, std::size_t perturbations = 100,
                                  std::uint64_t seed = 0);

/// Deterministic part of a report manifest (no clock, no host data).
nlohmann::json report_manifest(const EnsembleSpec& spec, const std::string& experiment);

nlohmann::json to_json(const BatchSummary& s);
nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json to_json(const InterlaceReport& r);
nlohmann::json to_json(const KSReport& r);
nlohmann::json to_json(const EsdReport& r);
nlohmann::json to_json(const ResolventReport& r);
nlohmann::json to_json(const ContinuityReport& r);

nlohmann::json complex_json(Complex z);

const char* library_version();
const char* git_describe();

}  // namespace pontryagin
