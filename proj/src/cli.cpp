#include "pontryagin/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>

#include "pontryagin/errors.hpp"
#include "pontryagin/experiments.hpp"
#include "pontryagin/nevanlinna.hpp"

namespace pontryagin::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open \"" + path + "\"");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(origin + ": malformed JSON: " + e.what());
  }
}

// Inline JSON when it looks like an object, a file path otherwise.
nlohmann::json load_json_argument(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return parse_json_text(arg, "inline JSON");
  return parse_json_text(read_file(arg), arg);
}

std::string format_gznt_number(double v) {
  double r = std::round(v * 1e8) / 1e8;
  if (r == 0.0) r = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", r);
  return buf;
}

struct Overrides {
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::string model, dist, field, sizes, z;
  std::size_t n = 0, trials = 0;
  std::uint64_t trial = 0, seed = 0;
  double s = 0.0, s2 = 0.0, eps = 0.0;
};

struct Command {
  explicit Command(CLI::App* sub) : app(sub) {}
  CLI::App* app = nullptr;
  Overrides o;
};

void add_common(Command& c, bool ensemble) {
  c.app->add_option("--config", c.o.config, "JSON config (or a manifest.json to replay)");
  c.app->add_option("--out", c.o.out, "Output directory");
  c.app->add_option("--threads", c.o.threads, "Worker threads (default: PONTRYAGIN_THREADS or all cores)");
  if (!ensemble) return;
  c.app->add_option("--model", c.o.model, "signed-wigner | generic | diagonal-poly");
  c.app->add_option("--N", c.o.n, "Matrix size N");
  c.app->add_option("--s", c.o.s, "Entry scale s");
  c.app->add_option("--s2", c.o.s2, "Entry variance s^2 (alternative to --s)");
  c.app->add_option("--dist", c.o.dist, "gaussian | rademacher | uniform_sym");
  c.app->add_option("--field", c.o.field, "real | complex");
  c.app->add_option("--seed", c.o.seed, "Master seed");
  c.app->add_option("--trials", c.o.trials, "Number of trials");
}

bool given(const Command& c, const char* name) {
  const CLI::Option* opt = c.app->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

RunConfig resolve(const Command& c, RunConfig cfg) {
  if (!c.o.config.empty()) cfg = config_from_json(parse_json_text(read_file(c.o.config), c.o.config), cfg);
  try {
    if (given(c, "--model")) cfg.spec.model = parse_model(c.o.model);
    if (given(c, "--dist")) cfg.spec.dist.kind = parse_dist(c.o.dist);
    if (given(c, "--field")) cfg.spec.field = parse_field(c.o.field);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (given(c, "--N")) cfg.spec.N = c.o.n;
  if (given(c, "--s")) cfg.spec.s = c.o.s;
  if (given(c, "--s2")) {
    if (given(c, "--s")) throw UsageError("--s and --s2 are mutually exclusive");
    if (!(c.o.s2 > 0.0)) throw UsageError("--s2 must be positive");
    cfg.spec.s = std::sqrt(c.o.s2);
  }
  if (given(c, "--seed")) cfg.spec.seed = c.o.seed;
  if (given(c, "--trials")) cfg.trials = c.o.trials;
  if (given(c, "--trial")) cfg.trial = c.o.trial;
  if (given(c, "--sizes")) cfg.sizes = parse_sizes(c.o.sizes);
  if (given(c, "--eps")) cfg.eps = c.o.eps;
  if (given(c, "--z")) cfg.z = parse_complex(c.o.z);
  if (cfg.trials < 1) throw UsageError("trials must be at least 1");
  if (!(cfg.spec.s > 0.0)) throw UsageError("s must be positive");
  if (cfg.spec.N < 1) throw UsageError("N must be at least 1");
  for (const auto n : cfg.sizes) {
    if (n < 1) throw UsageError("sizes must be positive");
  }
  return cfg;
}

unsigned resolve_thread_count(const Command& c) {
  if (given(c, "--threads")) return c.o.threads;
  if (const char* env = std::getenv("PONTRYAGIN_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') throw UsageError("PONTRYAGIN_THREADS must be a nonnegative integer");
    return static_cast<unsigned>(v);
  }
  return 0;
}

void require_continuous(const RunConfig& cfg) {
  if (!cfg.spec.dist.continuous()) {
    throw UsageError("continuity hypothesis violated: the " + std::string(to_string(cfg.spec.dist.kind)) +
                     " entry law is not continuous");
  }
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class OutputSet {
 public:
  OutputSet(std::string dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  bool to_directory() const { return !dir_.empty(); }

  // Without a directory only the primary document goes to stdout.
  void write(const std::string& name, const std::string& content, bool primary) {
    if (dir_.empty()) {
      if (primary) out_ << content;
      return;
    }
    std::ofstream f(fs::path(dir_) / name, std::ios::binary);
    if (!f) throw UsageError("cannot write \"" + (fs::path(dir_) / name).string() + "\"");
    f << content;
    files_.push_back(name);
  }

  void manifest(const std::string& command_line, const RunConfig& cfg, unsigned threads, double seconds,
                nlohmann::json extra = nlohmann::json::object()) {
    if (dir_.empty()) return;
    nlohmann::json m = {{"command", command_line},
                        {"config", config_to_json(cfg)},
                        {"master_seed", cfg.spec.seed},
                        {"version", library_version()},
                        {"git_describe", git_describe()},
                        {"sign_convention", std::string(kSignConvention)},
                        {"timestamp", iso_timestamp()},
                        {"wall_clock_seconds", seconds},
                        {"threads", resolve_threads(threads)},
                        {"outputs", files_}};
    for (auto& [k, v] : extra.items()) m[k] = v;
    std::ofstream f(fs::path(dir_) / "manifest.json", std::ios::binary);
    f << m.dump(2) << "\n";
  }

 private:
  std::string dir_;
  std::ostream& out_;
  std::vector<std::string> files_;
};

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      os_ << (first ? "" : ",") << h;
      first = false;
    }
    os_ << "\n";
  }
  Csv& cell(const std::string& v) {
    os_ << (fresh_ ? "" : ",") << v;
    fresh_ = false;
    return *this;
  }
  Csv& cell(double v) { return cell(format_number(v)); }
  Csv& cell(std::size_t v) { return cell(std::to_string(v)); }
  void end() {
    os_ << "\n";
    fresh_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool fresh_ = true;
};

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RunOptions options_for(unsigned threads, bool keep_spectrum = false) {
  RunOptions o;
  o.threads = threads;
  o.keep_spectrum = keep_spectrum;
  return o;
}

// ---- subcommands ----------------------------------------------------------

int cmd_simulate(const Command& c, const std::string& cmdline, std::ostream& out, std::ostream& err) {
  if (c.o.out.empty()) throw UsageError("simulate: --out is required");
  const RunConfig cfg = resolve(c, RunConfig{});
  const unsigned threads = resolve_thread_count(c);
  const auto t0 = Clock::now();
  RunOptions opts = options_for(threads, true);
  opts.compute_lambda = false;
  const auto records = run_trials(cfg.spec, cfg.trials, opts);

  Csv eig({"trial", "index", "re", "im"});
  Csv beta({"trial", "N", "re", "im", "case", "multiplicity"});
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& r : records) {
    if (!r.ok()) {
      failed.push_back({{"trial", r.trial}, {"error", *r.error}, {"ambiguous", r.ambiguous}});
      err << "trial " << r.trial << ": " << *r.error << "\n";
      continue;
    }
    for (Eigen::Index k = 0; k < r.spectrum.size(); ++k) {
      eig.cell(static_cast<std::size_t>(r.trial)).cell(static_cast<std::size_t>(k)).cell(r.spectrum(k).real()).cell(r.spectrum(k).imag());
      eig.end();
    }
    beta.cell(static_cast<std::size_t>(r.trial)).cell(r.spec.N).cell(r.beta.real()).cell(r.beta.imag());
    beta.cell(std::string(to_string(r.label))).cell(static_cast<std::size_t>(r.multiplicity));
    beta.end();
  }
  OutputSet outputs(c.o.out, out);
  outputs.write("eigenvalues.csv", eig.str(), false);
  outputs.write("beta.csv", beta.str(), false);
  const bool partial = !failed.empty();
  outputs.manifest(cmdline, cfg, threads, since(t0),
                   {{"partial", partial}, {"failed_trials", failed}, {"summary", to_json(summarize(records))}});
  return partial ? kNumerical : kOk;
}

int cmd_gznt(const std::string& measure, double a, double s2, const std::string& method, std::ostream& out) {
  SpectralMeasure mu;
  try {
    mu = measure_from_json(load_json_argument(measure));
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(s2 > 0.0)) throw UsageError("gznt: --s2 must be positive");
  const N1Function q{a, s2, mu};
  Gznt g;
  if (method == "discrete") {
    if (!std::holds_alternative<DiscreteMeasure>(mu)) throw UsageError("gznt: --method discrete needs a discrete measure");
    g = gznt_discrete(q);
  } else if (method == "newton") {
    g = gznt_newton(q);
  } else {
    throw UsageError("gznt: unknown method \"" + method + "\"");
  }
  out << format_gznt_number(g.point.real()) << " " << format_gznt_number(g.point.imag()) << " " << to_string(g.kind)
      << " " << (g.kind == GzntKind::real && g.limit_value ? format_gznt_number(*g.limit_value) : "-") << "\n";
  return kOk;
}

int cmd_convergence(const Command& c, const std::string& cmdline, std::ostream& out) {
  RunConfig base;
  base.sizes = {100, 400};
  base.trials = 100;
  const RunConfig cfg = resolve(c, base);
  if (cfg.sizes.empty()) throw UsageError("convergence: --sizes is empty");
  const unsigned threads = resolve_thread_count(c);
  const auto t0 = Clock::now();
  const ConvergenceReport rep = convergence_in_probability(cfg.spec, cfg.sizes, cfg.eps, cfg.trials, options_for(threads));
  Csv csv({"N", "trials", "valid", "within", "fraction_within"});
  for (std::size_t k = 0; k < rep.sizes.size(); ++k) {
    csv.cell(rep.sizes[k]).cell(rep.trials).cell(rep.valid[k]).cell(rep.within[k]).cell(rep.fraction_within[k]);
    csv.end();
  }
  OutputSet outputs(c.o.out, out);
  outputs.write("convergence.json", dump(to_json(rep)), true);
  outputs.write("convergence.csv", csv.str(), false);
  outputs.manifest(cmdline, cfg, threads, since(t0));
  for (const auto& b : rep.batches) {
    if (b.failed()) return kNumerical;
  }
  return kOk;
}

BlockHSelfAdjoint block_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("block: expected an object with a, b, c");
  for (const auto& [key, value] : j.items()) {
    if (key != "a" && key != "b" && key != "c") throw UsageError("block: unknown field \"" + key + "\"");
  }
  try {
    BlockHSelfAdjoint m;
    m.a = j.at("a").get<double>();
    const auto b = j.value("b", std::vector<double>{});
    const auto c = j.value("c", std::vector<std::vector<double>>{});
    const auto n = static_cast<Eigen::Index>(b.size());
    m.b.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) m.b(i) = b[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(c.size()) != n) throw UsageError("block: c must be n x n");
    m.c.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(c[static_cast<std::size_t>(i)].size()) != n) throw UsageError("block: c must be n x n");
      for (Eigen::Index k = 0; k < n; ++k) m.c(i, k) = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("block: ") + e.what());
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int cmd_interlace(const Command& c, const std::string& block, const std::string& cmdline, std::ostream& out) {
  RunConfig base;
  base.spec.N = 200;
  base.trials = 100;
  const RunConfig cfg = resolve(c, base);
  require_continuous(cfg);
  const unsigned threads = resolve_thread_count(c);
  const auto t0 = Clock::now();
  std::vector<TrialRecord> records;
  EnsembleSpec spec = cfg.spec;
  if (!block.empty()) {
    const BlockHSelfAdjoint m = block_from_json(load_json_argument(block));
    spec.N = m.n();
    records.push_back(analyze_block(m, spec, 0, options_for(threads)));
  } else {
    records = run_trials(spec, cfg.trials, options_for(threads));
  }
  const InterlaceReport rep = aggregate_interlacing(records);
  Csv csv({"trial", "case", "interlaced"});
  for (const auto& r : records) {
    const auto v = interlacing_check(r);
    csv.cell(static_cast<std::size_t>(r.trial)).cell(r.ok() ? std::string(to_string(r.label)) : "error").cell(v ? (*v ? "1" : "0") : "NA");
    csv.end();
  }
  nlohmann::json doc = {{"manifest", report_manifest(spec, "interlace")}, {"report", to_json(rep)}};
  if (!block.empty()) {
    const auto v = interlacing_check(records.front());
    doc["interlaced"] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  }
  OutputSet outputs(c.o.out, out);
  outputs.write("interlace.json", dump(doc), true);
  outputs.write("interlace.csv", csv.str(), false);
  outputs.manifest(cmdline, cfg, threads, since(t0));
  return summarize(records).failed() ? kNumerical : kOk;
}

int cmd_esd(const Command& c, const std::string& cmdline, std::ostream& out) {
  RunConfig base;
  base.spec.N = 2000;
  const RunConfig cfg = resolve(c, base);
  require_continuous(cfg);
  const unsigned threads = resolve_thread_count(c);
  const auto t0 = Clock::now();
  const EsdReport rep = esd_experiment(cfg.spec, cfg.trial, options_for(threads));
  OutputSet outputs(c.o.out, out);
  outputs.write("esd.json", dump(to_json(rep)), true);
  outputs.manifest(cmdline, cfg, threads, since(t0));
  return kOk;
}

int cmd_bq(const Command& c, const std::string& cmdline, std::ostream& out) {
  RunConfig base;
  base.sizes = {250, 1000};
  base.trials = 100;
  const RunConfig cfg = resolve(c, base);
  if (cfg.sizes.empty()) throw UsageError("bq: --sizes is empty");
  if (!(cfg.z.imag() > 0.0)) throw UsageError("bq: --z must lie in the upper half-plane");
  const unsigned threads = resolve_thread_count(c);
  const auto t0 = Clock::now();
  const ResolventReport rep = resolvent_concentration(cfg.spec, cfg.z, cfg.sizes, cfg.trials, options_for(threads));
  Csv csv({"N", "trial", "re", "im"});
  for (std::size_t k = 0; k < rep.sizes.size(); ++k) {
    for (std::size_t t = 0; t < rep.samples[k].size(); ++t) {
      csv.cell(rep.sizes[k]).cell(t).cell(rep.samples[k][t].real()).cell(rep.samples[k][t].imag());
      csv.end();
    }
  }
  OutputSet outputs(c.o.out, out);
  outputs.write("bq.json", dump(to_json(rep)), true);
  outputs.write("bq.csv", csv.str(), false);
  outputs.manifest(cmdline, cfg, threads, since(t0));
  return kOk;
}

int cmd_figure(const Command& c, const std::string& name, const std::string& cmdline, std::ostream& out,
               std::ostream& err) {
  RunConfig base;
  if (name == "spectrum") {
    base.spec.N = 100;
  } else if (name == "beta-parts") {
    base.sizes = {50, 100, 200, 400, 800, 1600};
  } else if (name == "diag-imag") {
    base.spec.model = Model::diagonal_poly;
    base.spec.s = std::sqrt(1.0 / 3.0);
    base.sizes = {50, 100, 200, 400, 800, 1600};
  } else {
    throw UsageError("figure: unknown name \"" + name + "\" (expected spectrum, beta-parts or diag-imag)");
  }
  const RunConfig cfg = resolve(c, base);
  const unsigned threads = resolve_thread_count(c);
  const auto t0 = Clock::now();
  int code = kOk;
  std::string csv_text;
  if (name == "spectrum") {
    const TrialRecord r = analyze_block(sample(cfg.spec, cfg.trial), cfg.spec, cfg.trial, options_for(threads, true));
    if (!r.ok()) {
      err << "trial " << r.trial << ": " << *r.error << "\n";
      return kNumerical;
    }
    Csv csv({"trial", "index", "re", "im", "case"});
    for (Eigen::Index k = 0; k < r.spectrum.size(); ++k) {
      csv.cell(static_cast<std::size_t>(r.trial)).cell(static_cast<std::size_t>(k)).cell(r.spectrum(k).real()).cell(r.spectrum(k).imag());
      csv.cell(std::string(to_string(r.label)));
      csv.end();
    }
    csv_text = csv.str();
  } else {
    if (cfg.sizes.empty()) throw UsageError("figure: --sizes is empty");
    const bool parts = name == "beta-parts";
    Csv csv = parts ? Csv({"N", "trial", "re", "im"}) : Csv({"N", "trial", "im"});
    RunOptions opts = options_for(threads);
    opts.compute_lambda = false;
    for (const std::size_t n : cfg.sizes) {
      EnsembleSpec sized = cfg.spec;
      sized.N = n;
      for (const auto& r : run_trials(sized, cfg.trials, opts)) {
        if (!r.ok()) {
          err << "N=" << n << " trial " << r.trial << ": " << *r.error << "\n";
          code = kNumerical;
          continue;
        }
        csv.cell(n).cell(static_cast<std::size_t>(r.trial));
        if (parts) csv.cell(r.beta.real());
        csv.cell(r.beta.imag());
        csv.end();
      }
    }
    csv_text = csv.str();
  }
  OutputSet outputs(c.o.out, out);
  outputs.write(name + ".csv", csv_text, true);
  outputs.manifest(cmdline, cfg, threads, since(t0), {{"figure", name}});
  return code;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::complex<double> parse_complex(const std::string& text) {
  static const std::regex pair(R"(^\s*([-+]?[0-9.eE+-]+)\s*,\s*([-+]?[0-9.eE+-]+)\s*$)");
  static const std::regex imag_only(R"(^\s*([-+]?[0-9.eE]*)\s*i\s*$)");
  static const std::regex full(R"(^\s*([-+]?[0-9.eE]+)\s*([-+])\s*([0-9.eE]*)\s*i\s*$)");
  static const std::regex real_only(R"(^\s*([-+]?[0-9.eE+-]+)\s*$)");
  auto num = [&](const std::string& s, double dflt) {
    if (s.empty() || s == "+") return dflt;
    if (s == "-") return -dflt;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number");
    return v;
  };
  std::smatch m;
  try {
    if (std::regex_match(text, m, pair)) return {num(m[1], 0.0), num(m[2], 0.0)};
    if (std::regex_match(text, m, full)) {
      const double im = num(m[3], 1.0);
      return {num(m[1], 0.0), m[2] == "-" ? -im : im};
    }
    if (std::regex_match(text, m, imag_only)) return {0.0, num(m[1], 1.0)};
    if (std::regex_match(text, m, real_only)) return {num(m[1], 0.0), 0.0};
  } catch (const std::exception&) {
  }
  throw UsageError("cannot parse complex number \"" + text + "\" (use \"re,im\" or \"a+bi\")");
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v < 1) throw UsageError("bad size \"" + item + "\" in --sizes");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  if (sizes.empty()) throw UsageError("--sizes is empty");
  return sizes;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j = spec_to_json(c.spec);
  j["trials"] = c.trials;
  j["sizes"] = c.sizes;
  j["eps"] = c.eps;
  j["z"] = nlohmann::json::array({c.z.real(), c.z.imag()});
  j["trial"] = c.trial;
  return j;
}

RunConfig config_from_json(const nlohmann::json& doc, RunConfig base) {
  if (!doc.is_object()) throw UsageError("config: expected a JSON object");
  const nlohmann::json& j = doc.contains("config") && doc.contains("command") ? doc.at("config") : doc;
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  nlohmann::json spec_part = spec_to_json(base.spec);
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "trials") {
        if (!value.is_number_unsigned()) throw UsageError("config: field \"trials\" must be a nonnegative integer");
        base.trials = value.get<std::size_t>();
      } else if (key == "sizes") {
        base.sizes.clear();
        for (const auto& v : value) {
          if (!v.is_number_unsigned() || v.get<std::size_t>() < 1) {
            throw UsageError("config: field \"sizes\" must hold positive integers");
          }
          base.sizes.push_back(v.get<std::size_t>());
        }
      } else if (key == "eps") {
        if (!value.is_number()) throw UsageError("config: field \"eps\" must be a number");
        base.eps = value.get<double>();
      } else if (key == "z") {
        if (value.is_string()) {
          base.z = parse_complex(value.get<std::string>());
        } else if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
          base.z = {value[0].get<double>(), value[1].get<double>()};
        } else {
          throw UsageError("config: field \"z\" must be [re, im] or a string");
        }
      } else if (key == "trial") {
        if (!value.is_number_unsigned()) throw UsageError("config: field \"trial\" must be a nonnegative integer");
        base.trial = value.get<std::uint64_t>();
      } else {
        spec_part[key] = value;
      }
    }
    base.spec = spec_from_json(spec_part);
  } catch (const UsageError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return base;
}

RunConfig config_from_json(const nlohmann::json& j) { return config_from_json(j, RunConfig{}); }

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for H-selfadjoint random matrices with one eigenvalue of nonpositive type", "pontryagin"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()) + " (" + git_describe() + ")");

  Command simulate{app.add_subcommand("simulate", "Sample an ensemble and write its spectra")};
  add_common(simulate, true);

  Command gznt{app.add_subcommand("gznt", "GZNT of a - z + s2 * mu^(z)")};
  std::string measure, method = "newton";
  double a = 0.0, s2 = 1.0;
  gznt.app->add_option("--measure", measure, "Measure JSON (inline or file)")->required();
  gznt.app->add_option("--a", a, "Constant a");
  gznt.app->add_option("--s2", s2, "Factor s^2");
  gznt.app->add_option("--method", method, "newton | discrete");

  auto add_experiment = [&](Command& c) {
    add_common(c, true);
    c.app->add_option("--sizes", c.o.sizes, "Comma-separated sizes");
    c.app->add_option("--eps", c.o.eps, "Tolerance eps");
    c.app->add_option("--z", c.o.z, "Complex point, \"re,im\" or \"a+bi\"");
    c.app->add_option("--trial", c.o.trial, "Trial index");
  };
  Command convergence{app.add_subcommand("convergence", "Convergence in probability of beta_N")};
  add_experiment(convergence);
  Command interlace{app.add_subcommand("interlace", "Interlacing of real eigenvalues with those of C")};
  add_experiment(interlace);
  std::string block;
  interlace.app->add_option("--block", block, "Deterministic block JSON {a, b, c} (inline or file)");
  Command esd_cmd{app.add_subcommand("esd", "KS distance of the real spectrum to the limit law")};
  add_experiment(esd_cmd);
  Command bq{app.add_subcommand("bq", "Concentration of b*(C - z)^{-1} b")};
  add_experiment(bq);
  Command figure{app.add_subcommand("figure", "CSV data behind the figures")};
  add_experiment(figure);
  std::string figure_name;
  figure.app->add_option("name", figure_name, "spectrum | beta-parts | diag-imag")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::string cmdline;
  for (int k = 0; k < argc; ++k) cmdline += (k ? " " : "") + std::string(argv[k]);

  try {
    if (*simulate.app) return cmd_simulate(simulate, cmdline, out, err);
    if (*gznt.app) return cmd_gznt(measure, a, s2, method, out);
    if (*convergence.app) return cmd_convergence(convergence, cmdline, out);
    if (*interlace.app) return cmd_interlace(interlace, block, cmdline, out);
    if (*esd_cmd.app) return cmd_esd(esd_cmd, cmdline, out);
    if (*bq.app) return cmd_bq(bq, cmdline, out);
    if (*figure.app) return cmd_figure(figure, figure_name, cmdline, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("pontryagin");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pontryagin::cli
