#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pontryagin/ensembles.hpp"

namespace pontryagin::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

/// The one config schema shared by every subcommand: the ensemble fields plus
/// experiment parameters. Unknown fields are rejected.
struct RunConfig {
  EnsembleSpec spec;
  std::size_t trials = 1;
  std::vector<std::size_t> sizes;
  double eps = 0.1;
  std::complex<double> z{0.0, 2.0};
  std::uint64_t trial = 0;
};

nlohmann::json config_to_json(const RunConfig& c);
/// Also accepts a manifest.json written by this tool (its "config" member).
RunConfig config_from_json(const nlohmann::json& j);
/// Fields present in `j` replace those of `base`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base);

std::complex<double> parse_complex(const std::string& text);
std::vector<std::size_t> parse_sizes(const std::string& text);

/// Round-trip formatting: 17 significant digits.
std::string format_number(double v);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pontryagin::cli
