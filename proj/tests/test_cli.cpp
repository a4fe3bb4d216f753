#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "delaylab/cli.hpp"
#include "delaylab/csv.hpp"
#include "delaylab/error.hpp"
#include "delaylab/matcore.hpp"
#include "oracle.hpp"

using namespace delaylab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// Value following `key` on its own "key value" line.
double value_after(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " ", 0) == 0) return csv::parse_double(line.substr(key.size() + 1));
  FAIL("missing key " << key);
  return 0.0;
}

}  // namespace

TEST_CASE("parse_complex") {
  CHECK(cli::parse_complex("0.5") == Complex(0.5, 0));
  CHECK(cli::parse_complex("1+2j") == Complex(1, 2));
  CHECK(cli::parse_complex("1-2i") == Complex(1, -2));
  CHECK(cli::parse_complex("-3j") == Complex(0, -3));
  CHECK(cli::parse_complex("+2") == Complex(2, 0));
  CHECK(cli::parse_complex("1e-3+1e2j") == Complex(1e-3, 1e2));
  for (const char* bad : {"", "j", "1+j2", "abc", "1+2", "1+2jj"}) CHECK_THROWS_AS(cli::parse_complex(bad), Error);
}

TEST_CASE("spectrum: worked scalar example") {
  const Run r = cli_run({"spectrum", "--scalar", "--omega", "1", "--n", "3"});
  CHECK(r.code == cli::kOk);
  CHECK(value_after(r.out, "oracle kappa") == doctest::Approx(2.414213562373095).epsilon(1e-10));
  CHECK(value_after(r.out, "max_rel_deviation") <= 1e-12);
  CHECK(r.out.find("match") != std::string::npos);
  CHECK(r.out.find("MISMATCH") == std::string::npos);
  CHECK(cli_run({"spectrum", "--scalar", "--omega", "0.3+0.4j", "--n", "5"}).code == cli::kOk);
}

TEST_CASE("exit codes") {
  CHECK(cli_run({}).code == cli::kUsageError);
  CHECK(cli_run({"frobnicate"}).code == cli::kUsageError);
  CHECK(cli_run({"spectrum", "--scalar", "--omega", "1"}).code == cli::kUsageError);          // no --n
  CHECK(cli_run({"spectrum", "--scalar", "--omega", "1", "--n", "0"}).code == cli::kUsageError);
  CHECK(cli_run({"spectrum", "--scalar", "--omega", "x", "--n", "2"}).code == cli::kUsageError);
  CHECK(cli_run({"sweep", "--experiment", "fig9", "--out", "x"}).code == cli::kUsageError);
  CHECK(cli_run({"region", "--resolution", "1"}).code == cli::kUsageError);
  CHECK(cli_run({"verify", "--w", "/nonexistent/w.csv", "--n", "2"}).code == cli::kValidationFailure);
  CHECK(cli_run({"--help"}).code == cli::kOk);

  TempDir dir("delaylab_test_cli_codes");
  ComplexMatrix w(2, 2);
  w << 0.1, 0.5, 0.0, 0.2;
  csv::save_matrix(dir.file("w.csv"), w);
  const Run notherm = cli_run({"verify", "--w", dir.file("w.csv"), "--n", "2", "--class", "hermitian"});
  CHECK(notherm.code == cli::kValidationFailure);
  CHECK(cli_run({"verify", "--w", dir.file("w.csv"), "--n", "2"}).code == cli::kOk);
}

TEST_CASE("build -> file -> spectrum --matrix round trip") {
  TempDir dir("delaylab_test_cli_build");
  oracle::Rng rng(3);
  const ComplexMatrix w = rng.complex_gaussian(3, 3) * 0.4;
  csv::save_matrix(dir.file("w.csv"), w);
  for (const char* what : {"delay", "gram"}) {
    const std::string out = dir.file(std::string(what) + ".csv");
    REQUIRE(cli_run({"build", "--what", what, "--w", dir.file("w.csv"), "--n", "4", "--out", out}).code == cli::kOk);
    const ComplexMatrix a = csv::load_matrix(out);
    const ComplexMatrix md = oracle::delay_matrix(w, 4, 1.0);
    const ComplexMatrix expected = std::string(what) == "delay" ? md : ComplexMatrix(md * md.adjoint());
    CHECK((a - expected).cwiseAbs().maxCoeff() <= 1e-15);

    const Run s = cli_run({"spectrum", "--matrix", out});
    REQUIRE(s.code == cli::kOk);
    const auto sv = oracle::singular_values(expected);
    // Printed with 12 significant digits.
    CHECK(value_after(s.out, "sigma_max") == doctest::Approx(sv.front()).epsilon(1e-11));
    CHECK(value_after(s.out, "sigma_min") == doctest::Approx(sv.back()).epsilon(1e-11));
  }
  // The recurrence sign flips W.
  REQUIRE(cli_run({"build", "--w", dir.file("w.csv"), "--n", "2", "--signed", "--out", dir.file("s.csv")}).code ==
          cli::kOk);
  CHECK((csv::load_matrix(dir.file("s.csv")) - oracle::delay_matrix(w, 2, -1.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bounds and verify") {
  const Run b = cli_run({"bounds", "--sigma-min", "1", "--sigma-max", "1"});
  CHECK(b.code == cli::kOk);
  CHECK(b.out.find("embedding guaranteed") != std::string::npos);
  CHECK(value_after(b.out, "sigma_max_bound") == 2.0);
  const Run nb = cli_run({"bounds", "--sigma-min", "0", "--sigma-max", "0.9"});
  CHECK(nb.out.find("embedding not guaranteed") != std::string::npos);

  const Run v = cli_run({"verify", "--scalar", "--omega", "0.7", "--n", "6"});
  CHECK(v.code == cli::kOk);
  CHECK(v.out.find("FAIL") == std::string::npos);
  CHECK(v.out.find("PASS kappa_bound") != std::string::npos);
}

TEST_CASE("simulate writes and replays a trace") {
  TempDir dir("delaylab_test_cli_sim");
  const Run a = cli_run({"simulate", "--scalar", "--omega", "0.5", "--n", "3", "--signal", "white-noise", "--T", "40",
                         "--b", "0.25", "--seed", "9", "--trace-out", dir.file("t.csv")});
  REQUIRE(a.code == cli::kOk);
  CHECK(value_after(a.out, "max_delay_residual") <= 1e-12);
  CHECK(value_after(a.out, "max_reconstruction_gap") <= 1e-9);
  CHECK(a.out.find("\nok") != std::string::npos);
  const Run b = cli_run({"simulate", "--scalar", "--omega", "0.5", "--n", "3", "--b", "0.25", "--input",
                         dir.file("t.csv")});
  REQUIRE(b.code == cli::kOk);
  CHECK(value_after(b.out, "imported_state_deviation") <= 1e-12);
  CHECK(value_after(b.out, "max_delay_residual") == value_after(a.out, "max_delay_residual"));
}

TEST_CASE("sweep: determinism, seed sources and precedence") {
  TempDir dir("delaylab_test_cli_sweep");
  csv::write_atomic(dir.file("cfg.json"),
                    R"({"experiment": "general-cond", "seed": 5, "samples_per_cell": 2,
                        "grids": {"m": [1, 2], "n": [2, 3], "sigma_max": [0.1, 0.4]}})");
  auto sweep = [&](const std::string& name, std::vector<std::string> extra) {
    std::vector<std::string> args = {"sweep", "--config", dir.file("cfg.json"), "--quiet", "--out", dir.file(name)};
    args.insert(args.end(), extra.begin(), extra.end());
    const Run r = cli_run(args);
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    return nlohmann::json::parse(csv::read_file(dir.file(name) + ".json"));
  };
  auto without_timing = [&](const std::string& name) {
    std::istringstream in(csv::read_file(dir.file(name)));
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };

  CHECK(sweep("a.csv", {}).at("config").at("seed") == 5);
  sweep("b.csv", {"--threads", "2"});
  CHECK(without_timing("a.csv") == without_timing("b.csv"));

  const auto flagged = sweep("c.csv", {"--seed", "6", "--samples", "1"});
  CHECK(flagged.at("config").at("seed") == 6);
  CHECK(flagged.at("config").at("samples_per_cell") == 1);
  CHECK(flagged.at("records") == 8);
  CHECK(without_timing("a.csv") != without_timing("c.csv"));

  // Without a seed anywhere the environment supplies it.
  csv::write_atomic(dir.file("cfg.json"), R"({"grids": {"m": [2], "n": [2], "sigma_max": [0.3]}})");
  ::setenv("DELAYLAB_SEED", "123", 1);
  CHECK(sweep("d.csv", {"--experiment", "lag-growth", "--samples", "1"}).at("config").at("seed") == 123);
  ::unsetenv("DELAYLAB_SEED");
  CHECK(sweep("e.csv", {"--experiment", "lag-growth", "--samples", "1"}).at("config").at("seed") == 0);

  const Run bad = cli_run({"sweep", "--experiment", "general-cond", "--out", dir.file("f.csv"), "--quiet", "--config",
                           dir.file("missing.json")});
  CHECK(bad.code != cli::kOk);
}

TEST_CASE("region subcommand") {
  const Run r = cli_run({"region", "--resolution", "3"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.rfind("sigma_min,sigma_max_weak,sigma_max_case1_boundary,sigma_max_case2\n", 0) == 0);
  CHECK(r.out.find("\n2,2.5,,3\n") != std::string::npos);
}
