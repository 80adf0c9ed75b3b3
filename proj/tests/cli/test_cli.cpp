#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pontryagin/cli.hpp"

namespace fs = std::filesystem;
using namespace pontryagin;
using namespace pontryagin::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const char* base = std::getenv("PONTRYAGIN_TEST_TMP");
  const fs::path dir = fs::path(base ? base : fs::temp_directory_path().string()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("gznt examples") {
  auto r = run({"gznt", "--measure", R"({"kind":"semicircle","s":1})", "--a", "0", "--s2", "1"});
  CHECK(r.code == 0);
  CHECK(r.out == "0 0.70710678 interior -\n");
  CHECK(r.err.empty());

  r = run({"gznt", "--measure", R"({"kind":"poly_cubic"})", "--a", "0", "--s2", "0.3333333333333333"});
  CHECK(r.code == 0);
  CHECK(r.out == "0 0 real 0\n");

  for (const char* method : {"newton", "discrete"}) {
    r = run({"gznt", "--measure", R"({"kind":"discrete","atoms":[0],"weights":[1]})", "--method", method});
    CHECK(r.code == 0);
    CHECK(r.out == "0 1 interior -\n");
  }

  r = run({"gznt", "--measure", R"({"kind":"cauchy"})"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK_FALSE(r.err.empty());
  CHECK(run({"gznt", "--measure", R"({"kind":"semicircle","s":1})", "--method", "secant"}).code == 2);
  CHECK(run({"gznt", "--measure", R"({"kind":"semicircle","s":1})", "--method", "discrete"}).code == 2);
  CHECK(run({"gznt"}).code == 2);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"simulate", "--bogus"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  const auto dir = scratch("usage");
  CHECK(run({"simulate", "--N", "10"}).code == 2);
  CHECK(run({"simulate", "--trials", "0", "--out", dir.string()}).code == 2);
  CHECK(run({"simulate", "--model", "wishart", "--out", dir.string()}).code == 2);
  CHECK(run({"simulate", "--s", "1", "--s2", "1", "--out", dir.string()}).code == 2);
  CHECK(run({"figure", "histogram"}).code == 2);
  CHECK(run({"bq", "--z", "1,0", "--sizes", "10", "--trials", "2"}).code == 2);
  CHECK(run({"convergence", "--sizes", "10,x"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("malformed config reports the field or line") {
  const auto dir = scratch("config");
  std::ofstream(dir / "typo.json") << R"({"model":"signed_wigner","sigma":2})";
  auto r = run({"simulate", "--config", (dir / "typo.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("sigma") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{\n  \"N\": 10,\n  \"seed\" 3\n}\n";
  r = run({"simulate", "--config", (dir / "broken.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);

  std::ofstream(dir / "zero.json") << R"({"trials":0})";
  CHECK(run({"simulate", "--config", (dir / "zero.json").string(), "--out", (dir / "o").string()}).code == 2);
  CHECK(run({"simulate", "--config", (dir / "missing.json").string(), "--out", (dir / "o").string()}).code == 2);
}

TEST_CASE("simulate writes eigenvalues, beta and a manifest") {
  const auto dir = scratch("simulate");
  const auto r = run({"simulate", "--model", "signed-wigner", "--N", "100", "--seed", "1", "--trials", "3", "--out",
                      dir.string(), "--threads", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const auto eig = read_csv(dir / "eigenvalues.csv");
  REQUIRE(eig.size() == 1 + 3 * 101);
  CHECK(eig[0] == std::vector<std::string>{"trial", "index", "re", "im"});
  const auto beta = read_csv(dir / "beta.csv");
  REQUIRE(beta.size() == 4);
  CHECK(beta[0] == std::vector<std::string>{"trial", "N", "re", "im", "case", "multiplicity"});
  for (std::size_t t = 0; t < 3; ++t) {
    if (beta[t + 1][4] != "Case1") continue;
    int nonreal = 0;
    for (std::size_t k = 1; k < eig.size(); ++k) {
      if (eig[k][0] == std::to_string(t) && std::stod(eig[k][3]) != 0.0) ++nonreal;
    }
    CHECK(nonreal == 2);
  }
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.at("master_seed") == 1);
  CHECK(manifest.at("partial") == false);
  CHECK(manifest.at("sign_convention") == "a = -x00/sqrt(N)");
  CHECK(manifest.at("outputs") == nlohmann::json::array({"eigenvalues.csv", "beta.csv"}));
  CHECK(manifest.at("config").at("N") == 100);
  CHECK(manifest.contains("timestamp"));
  CHECK(manifest.contains("version"));
  CHECK(manifest.at("threads") == 2);
  const std::string text = slurp(dir / "beta.csv");
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("simulate output is identical across thread counts and manifest replay") {
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  const auto c = scratch("repro_c");
  REQUIRE(run({"simulate", "--N", "40", "--seed", "9", "--trials", "6", "--threads", "1", "--out", a.string()}).code == 0);
  REQUIRE(run({"simulate", "--N", "40", "--seed", "9", "--trials", "6", "--threads", "3", "--out", b.string()}).code == 0);
  REQUIRE(run({"simulate", "--config", (a / "manifest.json").string(), "--out", c.string()}).code == 0);
  for (const char* f : {"eigenvalues.csv", "beta.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(c / f));
  }
}

TEST_CASE("PONTRYAGIN_THREADS is the fallback for --threads") {
  const auto dir = scratch("threads_env");
  setenv("PONTRYAGIN_THREADS", "2", 1);
  REQUIRE(run({"simulate", "--N", "5", "--out", dir.string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "manifest.json")).at("threads") == 2);
  setenv("PONTRYAGIN_THREADS", "many", 1);
  CHECK(run({"simulate", "--N", "5", "--out", dir.string()}).code == 2);
  unsetenv("PONTRYAGIN_THREADS");
}

TEST_CASE("convergence writes JSON and CSV") {
  const auto dir = scratch("convergence");
  const auto r = run({"convergence", "--model", "signed-wigner", "--sizes", "20,40", "--eps", "10", "--trials", "30",
                      "--seed", "5", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "convergence.json"));
  CHECK(j.at("fraction_within") == nlohmann::json::array({1.0, 1.0}));
  const auto csv = read_csv(dir / "convergence.csv");
  REQUIRE(csv.size() == 3);
  CHECK(csv[0] == std::vector<std::string>{"N", "trials", "valid", "within", "fraction_within"});

  // without --out the report goes to stdout
  const auto s = run({"convergence", "--sizes", "10", "--trials", "30", "--eps", "10"});
  REQUIRE(s.code == 0);
  CHECK(nlohmann::json::parse(s.out).contains("beta0"));
}

TEST_CASE("interlace on the 3x3 fixture") {
  const auto r = run({"interlace", "--block", R"({"a":0,"b":[0.6,0.8],"c":[[-1,0],[0,1]]})"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("interlaced") == true);
  CHECK(j.at("report").at("case1_count") == 1);
  CHECK(run({"interlace", "--block", R"({"a":0,"b":[1],"c":[[0,1],[1,0]]})"}).code == 2);
}

TEST_CASE("discrete entry laws are refused where continuity is needed") {
  for (const char* cmd : {"esd", "interlace"}) {
    const auto r = run({cmd, "--dist", "rademacher", "--N", "10", "--trials", "2"});
    CHECK(r.code == 2);
    CHECK(r.err.find("continuity hypothesis violated") != std::string::npos);
  }
}

TEST_CASE("esd on the diagonal model") {
  const auto r = run({"esd", "--model", "diagonal-poly", "--N", "400", "--seed", "2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("lambda").at("target") == "poly_cubic");
  CHECK(j.at("lambda").at("distance").get<double>() <= 0.1);
}

TEST_CASE("bq report") {
  const auto dir = scratch("bq");
  const auto r = run({"bq", "--sizes", "50,100", "--trials", "10", "--z", "0+2i", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "bq.json"));
  REQUIRE(j.at("per_size").size() == 2);
  CHECK(j.at("per_size")[1].at("N") == 100);
  CHECK(j.at("per_size")[0].contains("mean_abs_deviation"));
  CHECK(read_csv(dir / "bq.csv").size() == 1 + 20);
}

TEST_CASE("figure emitters") {
  auto r = run({"figure", "spectrum", "--seed", "1"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "trial,index,re,im,case");
  int rows = 0, nonreal = 0;
  std::string label;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::vector<std::string> cells;
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (std::stod(cells[3]) != 0.0) ++nonreal;
    label = cells[4];
  }
  CHECK(rows == 101);
  if (label == "Case1") CHECK(nonreal == 2);

  r = run({"figure", "beta-parts", "--sizes", "50,100", "--trials", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("N,trial,re,im\n", 0) == 0);
  r = run({"figure", "diag-imag", "--sizes", "50", "--trials", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("N,trial,im\n", 0) == 0);
}

TEST_CASE("number formatting and parsing helpers") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(parse_complex("0,2") == std::complex<double>(0, 2));
  CHECK(parse_complex("2i") == std::complex<double>(0, 2));
  CHECK(parse_complex("1-0.5i") == std::complex<double>(1, -0.5));
  CHECK(parse_complex("3") == std::complex<double>(3, 0));
  CHECK(parse_sizes("100,400") == std::vector<std::size_t>{100, 400});
  RunConfig cfg;
  cfg.sizes = {1, 2};
  cfg.spec.seed = 17;
  const auto back = config_from_json(config_to_json(cfg));
  CHECK(back.sizes == cfg.sizes);
  CHECK(back.spec.seed == 17);
  CHECK(config_to_json(back) == config_to_json(cfg));
}
