#include "pontryagin/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pontryagin/errors.hpp"

namespace pontryagin {

const char* library_version() { return PONTRYAGIN_VERSION; }
const char* git_describe() { return PONTRYAGIN_GIT_DESCRIBE; }

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) f(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          f(k);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

TrialRecord analyze_block(const BlockHSelfAdjoint& m, const EnsembleSpec& spec, std::uint64_t trial,
                          const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord r;
  r.spec = spec;
  r.trial = trial;
  try {
    const SpectralAnalysis sa = analyze_spectrum(m, options.tol);
    r.beta = sa.canonical.beta;
    r.label = sa.canonical.label;
    r.multiplicity = sa.canonical.multiplicity;
    r.zeta = sa.zeta;
    r.x_norm = sa.x_norm;
    if (options.keep_spectrum) r.spectrum = sa.eigenvalues;
  } catch (const AmbiguousClassification& e) {
    r.ambiguous = true;
    r.error = e.what();
  } catch (const NumericalError& e) {
    r.error = e.what();
  }
  if (options.compute_lambda && m.n() > 0) {
    const Eigen::VectorXd ev =
        has_zero_imag(m.c) ? hermitian_eigenvalues(Eigen::MatrixXd(m.c.real())) : hermitian_eigenvalues(m.c);
    r.lambda.assign(ev.data(), ev.data() + ev.size());
  }
  r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<TrialRecord> run_trials(const TrialSampler& sampler, const EnsembleSpec& spec, std::size_t trials,
                                    const RunOptions& options) {
  if (trials < 1) throw std::invalid_argument("run_trials: trials must be at least 1");
  std::vector<TrialRecord> records(trials);
  parallel_for(trials, options.threads, [&](std::size_t k) {
    const auto t = static_cast<std::uint64_t>(k);
    records[k] = analyze_block(sampler(t), spec, t, options);
  });
  return records;
}

std::vector<TrialRecord> run_trials(const EnsembleSpec& spec, std::size_t trials, const RunOptions& options) {
  spec.validate();
  return run_trials([&](std::uint64_t t) { return sample(spec, t); }, spec, trials, options);
}

BatchSummary summarize(const std::vector<TrialRecord>& records) {
  BatchSummary s;
  s.trials = records.size();
  for (const auto& r : records) {
    if (!r.ok()) {
      ++s.failures;
      if (r.ambiguous) ++s.ambiguous;
      continue;
    }
    ++s.case_counts[static_cast<std::size_t>(r.label) - 1];
  }
  return s;
}

ConvergenceReport convergence_in_probability(const EnsembleSpec& spec, const std::vector<std::size_t>& sizes,
                                             double eps, std::size_t trials, const RunOptions& options) {
  if (sizes.empty()) throw std::invalid_argument("convergence: no sizes given");
  if (!(eps > 0.0)) throw std::invalid_argument("convergence: eps must be positive");
  ConvergenceReport rep;
  rep.spec = spec;
  rep.sizes = sizes;
  rep.eps = eps;
  rep.trials = trials;
  rep.beta0 = gznt_newton(limit_function(spec)).point;
  RunOptions opts = options;
  opts.compute_lambda = false;
  for (const std::size_t n : sizes) {
    EnsembleSpec sized = spec;
    sized.N = n;
    const auto records = run_trials(sized, trials, opts);
    std::size_t within = 0, valid = 0;
    for (const auto& r : records) {
      if (!r.ok()) continue;
      ++valid;
      if (std::abs(r.beta - rep.beta0) < eps) ++within;
    }
    rep.within.push_back(within);
    rep.valid.push_back(valid);
    rep.fraction_within.push_back(valid == 0 ? 0.0 : static_cast<double>(within) / static_cast<double>(valid));
    rep.batches.push_back(summarize(records));
  }
  return rep;
}

std::optional<bool> interlacing_check(const TrialRecord& record) {
  if (!record.ok() || record.label != CaseLabel::case1) return std::nullopt;
  const auto& lam = record.lambda;
  const auto& zeta = record.zeta;
  if (lam.size() != record.spec.N || zeta.size() + 1 != lam.size()) {
    throw std::logic_error("interlacing_check: expected N eigenvalues of C and N-1 real eigenvalues of X");
  }
  const double margin = 1e-12 * record.x_norm;
  for (std::size_t k = 0; k < zeta.size(); ++k) {
    if (!(zeta[k] - lam[k] > margin) || !(lam[k + 1] - zeta[k] > margin)) return false;
  }
  return true;
}

InterlaceReport aggregate_interlacing(const std::vector<TrialRecord>& records) {
  InterlaceReport rep;
  rep.trials = records.size();
  for (const auto& r : records) {
    if (!r.ok()) {
      ++rep.failures;
      continue;
    }
    const auto verdict = interlacing_check(r);
    if (!verdict) continue;
    ++rep.case1_count;
    if (*verdict) ++rep.interlaced_count;
  }
  return rep;
}

double ks_distance(const std::vector<double>& s, const Cdf& target, double lo, double hi, std::size_t grid) {
  if (s.empty()) throw std::invalid_argument("ks_distance: no samples");
  if (!std::is_sorted(s.begin(), s.end())) throw std::invalid_argument("ks_distance: samples must be sorted");
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    const double x = s[i];
    const double below = target(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    d = std::max({d, std::abs(target(x) - static_cast<double>(j) / n), std::abs(below - static_cast<double>(i) / n)});
    i = j;
  }
  for (std::size_t g = 0; g < grid; ++g) {
    const double x = grid == 1 ? lo : lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid - 1);
    const auto count = std::upper_bound(s.begin(), s.end(), x) - s.begin();
    d = std::max(d, std::abs(target(x) - static_cast<double>(count) / n));
  }
  return d;
}

SpectralMeasure limit_measure(const EnsembleSpec& spec) { return limit_function(spec).measure; }

std::string describe(const SpectralMeasure& mu) {
  if (const auto* m = std::get_if<AbsContMeasure>(&mu)) {
    std::ostringstream os;
    os.precision(17);
    switch (m->kind) {
      case AbsContMeasure::Kind::semicircle: os << "semicircle(s=" << m->s << ")"; break;
      case AbsContMeasure::Kind::poly_cubic: os << "poly_cubic"; break;
      case AbsContMeasure::Kind::custom: os << "custom[" << m->lo << "," << m->hi << "]"; break;
    }
    return os.str();
  }
  return "discrete(" + std::to_string(std::get<DiscreteMeasure>(mu).atoms.size()) + " atoms)";
}

EsdReport esd_experiment(const EnsembleSpec& spec, std::uint64_t trial, const RunOptions& options) {
  RunOptions opts = options;
  opts.compute_lambda = true;
  const TrialRecord r = analyze_block(sample(spec, trial), spec, trial, opts);
  if (!r.ok()) throw NumericalError("esd: trial failed: " + *r.error);
  const SpectralMeasure mu = limit_measure(spec);
  const auto* m = std::get_if<AbsContMeasure>(&mu);
  const Cdf target = [&](double x) { return cdf(mu, x); };
  EsdReport rep;
  rep.spec = spec;
  rep.trial = trial;
  rep.label = r.label;
  rep.zeta = {r.zeta.size(), r.zeta.empty() ? 1.0 : ks_distance(r.zeta, target, m->lo, m->hi), describe(mu)};
  rep.lambda = {r.lambda.size(), ks_distance(r.lambda, target, m->lo, m->hi), describe(mu)};
  return rep;
}

ResolventReport resolvent_concentration(const EnsembleSpec& spec, Complex z, const std::vector<std::size_t>& sizes,
                                        std::size_t trials, const RunOptions& options) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("resolvent_concentration: z must lie in the upper half-plane");
  if (trials < 1) throw std::invalid_argument("resolvent_concentration: trials must be at least 1");
  ResolventReport rep;
  rep.spec = spec;
  rep.z = z;
  rep.sizes = sizes;
  rep.trials = trials;
  const N1Function limit = limit_function(spec);
  rep.target = limit.s2 * stieltjes(limit.measure, z);
  for (const std::size_t n : sizes) {
    EnsembleSpec sized = spec;
    sized.N = n;
    std::vector<Complex> values(trials);
    parallel_for(trials, options.threads, [&](std::size_t k) {
      const BlockHSelfAdjoint m = sample(sized, static_cast<std::uint64_t>(k));
      values[k] = tridiagonal_quadratic_form(tridiagonalize(m.c, m.b), z);
    });
    Complex mean = 0.0;
    double mad = 0.0;
    for (const Complex v : values) {
      mean += v;
      mad += std::abs(v - rep.target);
    }
    mean /= static_cast<double>(trials);
    rep.mean.push_back(mean);
    rep.mean_deviation.push_back(mean - rep.target);
    rep.mean_abs_deviation.push_back(mad / static_cast<double>(trials));
    rep.samples.push_back(std::move(values));
  }
  return rep;
}

ContinuityReport continuity_probe(const DiscreteMeasure& mu, double a, double scale, std::size_t perturbations,
                                  std::uint64_t seed) {
  if (scale < 0.0) throw std::invalid_argument("continuity_probe: perturbation scale must be nonnegative");
  mu.validate();
  ContinuityReport rep;
  rep.scale = scale;
  rep.perturbations = perturbations;
  rep.base = gznt_discrete(N1Function{a, 1.0, mu});
  const std::size_t k = mu.atoms.size();
  for (std::size_t p = 0; p < perturbations; ++p) {
    CounterRng rng = CounterRng::stream(seed, p, 0);
    std::vector<double> delta(k + 1);
    double l1 = 0.0;
    for (double& d : delta) {
      d = rng.normal();
      l1 += std::abs(d);
    }
    DiscreteMeasure moved = mu;
    for (std::size_t j = 0; j < k; ++j) {
      const double step = scale * delta[j] / l1;
      moved.weights[j] = moved.weights[j] + step > 0.0 ? moved.weights[j] + step : moved.weights[j] - step;
    }
    const double a_moved = a + scale * delta[k] / l1;
    try {
      const Gznt g = gznt_discrete(N1Function{a_moved, 1.0, moved});
      const double shift = std::abs(g.point - rep.base.point);
      rep.displacement.push_back(shift);
      rep.max_displacement = std::max(rep.max_displacement, shift);
    } catch (const NumericalError&) {
      ++rep.failures;
    }
  }
  return rep;
}

nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json report_manifest(const EnsembleSpec& spec, const std::string& experiment) {
  return {{"experiment", experiment},
          {"spec", spec_to_json(spec)},
          {"version", library_version()},
          {"git_describe", git_describe()},
          {"sign_convention", std::string(kSignConvention)},
          {"stochastic", true},
          {"seed", spec.seed}};
}

nlohmann::json to_json(const BatchSummary& s) {
  return {{"trials", s.trials},
          {"failures", s.failures},
          {"ambiguous", s.ambiguous},
          {"case_counts",
           {{"Case1", s.case_counts[0]}, {"Case2", s.case_counts[1]}, {"Case3", s.case_counts[2]}, {"Case4", s.case_counts[3]}}},
          {"batch_failed", s.failed()}};
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json per_size = nlohmann::json::array();
  for (std::size_t k = 0; k < r.sizes.size(); ++k) {
    per_size.push_back({{"N", r.sizes[k]},
                        {"within", r.within[k]},
                        {"valid", r.valid[k]},
                        {"fraction_within", r.fraction_within[k]},
                        {"batch", to_json(r.batches[k])}});
  }
  return {{"manifest", report_manifest(r.spec, "convergence")},
          {"sizes", r.sizes},
          {"eps", r.eps},
          {"beta0", complex_json(r.beta0)},
          {"trials", r.trials},
          {"fraction_within", r.fraction_within},
          {"per_size", per_size}};
}

nlohmann::json to_json(const InterlaceReport& r) {
  return {{"trials", r.trials},
          {"case1_count", r.case1_count},
          {"interlaced_count", r.interlaced_count},
          {"failures", r.failures}};
}

nlohmann::json to_json(const KSReport& r) {
  return {{"n_samples", r.n_samples}, {"distance", r.distance}, {"target", r.target}};
}

nlohmann::json to_json(const EsdReport& r) {
  return {{"manifest", report_manifest(r.spec, "esd")},
          {"trial", r.trial},
          {"case", to_string(r.label)},
          {"zeta", to_json(r.zeta)},
          {"lambda", to_json(r.lambda)}};
}

nlohmann::json to_json(const ResolventReport& r) {
  nlohmann::json per_size = nlohmann::json::array();
  for (std::size_t k = 0; k < r.sizes.size(); ++k) {
    per_size.push_back({{"N", r.sizes[k]},
                        {"mean", complex_json(r.mean[k])},
                        {"mean_deviation", complex_json(r.mean_deviation[k])},
                        {"mean_abs_deviation", r.mean_abs_deviation[k]}});
  }
  return {{"manifest", report_manifest(r.spec, "bq")},
          {"z", complex_json(r.z)},
          {"target", complex_json(r.target)},
          {"trials", r.trials},
          {"per_size", per_size}};
}

nlohmann::json to_json(const ContinuityReport& r) {
  return {{"base", complex_json(r.base.point)},
          {"base_kind", to_string(r.base.kind)},
          {"scale", r.scale},
          {"perturbations", r.perturbations},
          {"max_displacement", r.max_displacement},
          {"modulus", r.modulus},
          {"within_modulus", r.within_modulus()},
          {"failures", r.failures}};
}

}  // namespace pontryagin
