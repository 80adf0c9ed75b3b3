#include "pontryagin/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pontryagin {

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng CounterRng::stream(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t role) {
  return CounterRng(master_seed).split(trial).split(role);
}

CounterRng CounterRng::split(std::uint64_t child) const {
  CounterRng out(0);
  out.key_ = mix(key_ ^ mix(child + 0x243f6a8885a308d3ULL));
  return out;
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  while (u == 0.0) u = uniform();
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double angle = 2.0 * std::numbers::pi * v;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

std::string_view to_string(DistKind kind) {
  switch (kind) {
    case DistKind::gaussian: return "gaussian";
    case DistKind::rademacher: return "rademacher";
    case DistKind::uniform_sym: return "uniform_sym";
  }
  return "?";
}

std::string_view to_string(Field field) { return field == Field::real ? "real" : "complex"; }

std::string_view to_string(Model model) {
  switch (model) {
    case Model::signed_wigner: return "signed_wigner";
    case Model::generic: return "generic";
    case Model::diagonal_poly: return "diagonal_poly";
  }
  return "?";
}

DistKind parse_dist(std::string_view name) {
  if (name == "gaussian") return DistKind::gaussian;
  if (name == "rademacher") return DistKind::rademacher;
  if (name == "uniform_sym" || name == "uniform-sym" || name == "uniform") return DistKind::uniform_sym;
  throw std::invalid_argument("unknown distribution \"" + std::string(name) + "\"");
}

Field parse_field(std::string_view name) {
  if (name == "real") return Field::real;
  if (name == "complex") return Field::complex;
  throw std::invalid_argument("unknown field \"" + std::string(name) + "\"");
}

Model parse_model(std::string_view name) {
  if (name == "signed_wigner" || name == "signed-wigner") return Model::signed_wigner;
  if (name == "generic") return Model::generic;
  if (name == "diagonal_poly" || name == "diagonal-poly") return Model::diagonal_poly;
  throw std::invalid_argument("unknown model \"" + std::string(name) + "\"");
}

double EntryDistribution::draw(CounterRng& rng, double s) const {
  switch (kind) {
    case DistKind::gaussian: return s * rng.normal();
    case DistKind::rademacher: return (rng() >> 63) != 0 ? s : -s;
    case DistKind::uniform_sym: return std::sqrt(3.0) * s * (2.0 * rng.uniform() - 1.0);
  }
  return 0.0;
}

Complex EntryDistribution::draw_complex(CounterRng& rng, double s) const {
  const double part = s / std::numbers::sqrt2;
  const double re = draw(rng, part);
  const double im = draw(rng, part);
  return {re, im};
}

void EnsembleSpec::validate() const {
  if (N < 1) throw std::invalid_argument("ensemble: N must be at least 1");
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("ensemble: s must be positive and finite");
}

nlohmann::json spec_to_json(const EnsembleSpec& spec) {
  return {{"model", to_string(spec.model)}, {"N", spec.N},
          {"s", spec.s},                    {"dist", to_string(spec.dist.kind)},
          {"field", to_string(spec.field)}, {"seed", spec.seed}};
}

EnsembleSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("ensemble spec: expected a JSON object");
  EnsembleSpec spec;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "model") {
        spec.model = parse_model(value.get<std::string>());
      } else if (key == "N") {
        if (!value.is_number_integer() || value.get<long long>() < 1) throw std::invalid_argument("must be a positive integer");
        spec.N = value.get<std::size_t>();
      } else if (key == "s") {
        if (!value.is_number()) throw std::invalid_argument("must be a number");
        spec.s = value.get<double>();
      } else if (key == "dist") {
        spec.dist.kind = parse_dist(value.get<std::string>());
      } else if (key == "field") {
        spec.field = parse_field(value.get<std::string>());
      } else if (key == "seed") {
        if (!value.is_number_unsigned()) throw std::invalid_argument("must be a nonnegative integer");
        spec.seed = value.get<std::uint64_t>();
      } else {
        throw std::invalid_argument("unknown field");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("ensemble spec: field \"" + key + "\": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("ensemble spec: field \"" + key + "\": " + e.what());
    }
  }
  spec.validate();
  return spec;
}

namespace {

Eigen::VectorXcd raw_column(std::size_t n, double s, const EntryDistribution& dist, Field field, CounterRng& rng) {
  Eigen::VectorXcd x(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    x(j) = field == Field::real ? Complex(dist.draw(rng, s), 0.0) : dist.draw_complex(rng, s);
  }
  return x;
}

Eigen::MatrixXcd raw_wigner(std::size_t n, double s, const EntryDistribution& dist, Field field, CounterRng& rng) {
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd y(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    y(i, i) = dist.draw(rng, s);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      y(i, j) = field == Field::real ? Complex(dist.draw(rng, s), 0.0) : dist.draw_complex(rng, s);
      y(j, i) = std::conj(y(i, j));
    }
  }
  return y;
}

}  // namespace

Eigen::VectorXcd sample_column(std::size_t n, const std::function<Complex()>& entry) {
  Eigen::VectorXcd b(static_cast<Eigen::Index>(n));
  const double root = std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = entry() / root;
  return b;
}

Eigen::VectorXcd sample_column(std::size_t n, double s, const EntryDistribution& dist, Field field, CounterRng& rng) {
  return raw_column(n, s, dist, field, rng) / std::sqrt(static_cast<double>(n));
}

Eigen::MatrixXcd sample_wigner_hermitian(std::size_t n, double s, const EntryDistribution& dist, Field field,
                                         CounterRng& rng) {
  return raw_wigner(n, s, dist, field, rng) / std::sqrt(static_cast<double>(n));
}

double sample_poly_cubic(CounterRng& rng) { return std::cbrt(2.0 * rng.uniform() - 1.0); }

Eigen::MatrixXcd sample_diagonal_poly(std::size_t n, CounterRng& rng) {
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) c(j, j) = sample_poly_cubic(rng);
  return c;
}

Eigen::MatrixXcd signed_wigner_source(const EnsembleSpec& spec, std::uint64_t trial) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.N);
  CounterRng ra = CounterRng::stream(spec.seed, trial, static_cast<std::uint64_t>(StreamRole::a));
  CounterRng rb = CounterRng::stream(spec.seed, trial, static_cast<std::uint64_t>(StreamRole::b));
  CounterRng rc = CounterRng::stream(spec.seed, trial, static_cast<std::uint64_t>(StreamRole::c));
  Eigen::MatrixXcd y(n + 1, n + 1);
  y(0, 0) = spec.dist.draw(ra, spec.s);
  const Eigen::VectorXcd col = raw_column(spec.N, spec.s, spec.dist, spec.field, rb);
  const Eigen::MatrixXcd blk = raw_wigner(spec.N, spec.s, spec.dist, spec.field, rc);
  y.block(1, 0, n, 1) = col;
  y.block(0, 1, 1, n) = col.adjoint();
  y.block(1, 1, n, n) = blk;
  return y;
}

BlockHSelfAdjoint sample_signed_wigner(const EnsembleSpec& spec, std::uint64_t trial) {
  spec.validate();
  const double root = std::sqrt(static_cast<double>(spec.N));
  CounterRng ra = CounterRng::stream(spec.seed, trial, static_cast<std::uint64_t>(StreamRole::a));
  CounterRng rb = CounterRng::stream(spec.seed, trial, static_cast<std::uint64_t>(StreamRole::b));
  CounterRng rc = CounterRng::stream(spec.seed, trial, static_cast<std::uint64_t>(StreamRole::c));
  BlockHSelfAdjoint m;
  m.a = -spec.dist.draw(ra, spec.s) / root;
  m.b = sample_column(spec.N, spec.s, spec.dist, spec.field, rb);
  m.c = sample_wigner_hermitian(spec.N, spec.s, spec.dist, spec.field, rc);
  return m;
}

BlockHSelfAdjoint build_generic(const ScalarSampler& a, const ColumnSampler& b, const MatrixSampler& c,
                                std::uint64_t seed, std::uint64_t trial) {
  CounterRng ra = CounterRng::stream(seed, trial, static_cast<std::uint64_t>(StreamRole::a));
  CounterRng rb = CounterRng::stream(seed, trial, static_cast<std::uint64_t>(StreamRole::b));
  CounterRng rc = CounterRng::stream(seed, trial, static_cast<std::uint64_t>(StreamRole::c));
  BlockHSelfAdjoint m;
  m.a = a(ra);
  m.b = b(rb);
  m.c = c(rc);
  if (m.c.rows() != m.c.cols() || m.c.rows() != m.b.size()) {
    throw std::invalid_argument("build_generic: b and C have inconsistent sizes");
  }
  return m;
}

BlockHSelfAdjoint sample(const EnsembleSpec& spec, std::uint64_t trial) {
  spec.validate();
  const double root = std::sqrt(static_cast<double>(spec.N));
  auto column = [&](CounterRng& r) { return sample_column(spec.N, spec.s, spec.dist, spec.field, r); };
  switch (spec.model) {
    case Model::signed_wigner: return sample_signed_wigner(spec, trial);
    case Model::generic:
      return build_generic([&](CounterRng& r) { return spec.dist.draw(r, spec.s) / root; }, column,
                           [&](CounterRng& r) { return sample_wigner_hermitian(spec.N, spec.s, spec.dist, spec.field, r); },
                           spec.seed, trial);
    case Model::diagonal_poly:
      return build_generic([](CounterRng&) { return 0.0; }, column,
                           [&](CounterRng& r) { return sample_diagonal_poly(spec.N, r); }, spec.seed, trial);
  }
  throw std::invalid_argument("sample: unknown model");
}

N1Function limit_function(const EnsembleSpec& spec) {
  N1Function q;
  q.a = 0.0;
  q.s2 = spec.s * spec.s;
  if (spec.model == Model::diagonal_poly) {
    q.measure = AbsContMeasure::poly_cubic();
  } else {
    q.measure = AbsContMeasure::semicircle(spec.s);
  }
  return q;
}

}  // namespace pontryagin
