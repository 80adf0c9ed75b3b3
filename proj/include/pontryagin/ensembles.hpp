#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <json.hpp>

#include "pontryagin/indefinite_core.hpp"
#include "pontryagin/nevanlinna.hpp"

namespace pontryagin {

/// Counter-based stream: output k is mix(key + k * golden). Any stream can be
/// split into independent children without touching its own counter.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(mix(key ^ 0x6a09e667f3bcc909ULL)) {}

  /// Stream for one (master seed, trial, role) triple.
  static CounterRng stream(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t role);

  CounterRng split(std::uint64_t child) const;

  std::uint64_t operator()() { return mix(key_ + (++counter_) * kGolden); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform();
  /// Standard normal (Box-Muller, the second variate is kept for the next call).
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class StreamRole : std::uint64_t { a = 0, b = 1, c = 2 };

enum class DistKind { gaussian, rademacher, uniform_sym };
enum class Field { real, complex };
enum class Model { signed_wigner, generic, diagonal_poly };

std::string_view to_string(DistKind kind);
std::string_view to_string(Field field);
std::string_view to_string(Model model);
DistKind parse_dist(std::string_view name);
Field parse_field(std::string_view name);
/// Accepts both "signed_wigner" and "signed-wigner" spellings.
Model parse_model(std::string_view name);

/// Mean zero, variance s^2.
struct EntryDistribution {
  DistKind kind = DistKind::gaussian;

  bool continuous() const { return kind != DistKind::rademacher; }
  double draw(CounterRng& rng, double s) const;
  /// Real and imaginary parts independent with variance s^2 / 2 each.
  Complex draw_complex(CounterRng& rng, double s) const;
};

struct EnsembleSpec {
  Model model = Model::signed_wigner;
  std::size_t N = 100;
  double s = 1.0;
  EntryDistribution dist;
  Field field = Field::real;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json spec_to_json(const EnsembleSpec& spec);
/// Strict: unknown fields and malformed values throw std::invalid_argument.
EnsembleSpec spec_from_json(const nlohmann::json& j);

/// Sign convention: a = -x00 / sqrt(N), b = x_{j0} / sqrt(N), C = [x_ij] / sqrt(N),
/// so that assemble() equals H_N [x_ij] / sqrt(N) exactly.
inline constexpr std::string_view kSignConvention = "a = -x00/sqrt(N)";

/// The symmetric (Hermitian) (N+1)x(N+1) source matrix [x_ij] of a signed
/// Wigner draw, before scaling.
Eigen::MatrixXcd signed_wigner_source(const EnsembleSpec& spec, std::uint64_t trial = 0);
BlockHSelfAdjoint sample_signed_wigner(const EnsembleSpec& spec, std::uint64_t trial = 0);

/// i.i.d. entries of variance s^2 scaled by 1/sqrt(N).
Eigen::VectorXcd sample_column(std::size_t n, const std::function<Complex()>& entry);
Eigen::VectorXcd sample_column(std::size_t n, double s, const EntryDistribution& dist, Field field, CounterRng& rng);

/// Wigner matrix with entries of variance s^2 / N; exactly symmetric (Hermitian).
Eigen::MatrixXcd sample_wigner_hermitian(std::size_t n, double s, const EntryDistribution& dist, Field field,
                                         CounterRng& rng);

/// diag(c_1 ... c_N), c_j i.i.d. with density 3t^2/2 on [-1, 1] by inverse CDF.
Eigen::MatrixXcd sample_diagonal_poly(std::size_t n, CounterRng& rng);
double sample_poly_cubic(CounterRng& rng);

using ScalarSampler = std::function<double(CounterRng&)>;
using ColumnSampler = std::function<Eigen::VectorXcd(CounterRng&)>;
using MatrixSampler = std::function<Eigen::MatrixXcd(CounterRng&)>;

/// a, b and C each from their own stream of (seed, trial).
BlockHSelfAdjoint build_generic(const ScalarSampler& a, const ColumnSampler& b, const MatrixSampler& c,
                                std::uint64_t seed, std::uint64_t trial);

/// Dispatch on spec.model.
BlockHSelfAdjoint sample(const EnsembleSpec& spec, std::uint64_t trial);

/// The N1 function whose GZNT is the limit of beta_N: -z + s^2 mu0^(z).
N1Function limit_function(const EnsembleSpec& spec);

}  // namespace pontryagin
