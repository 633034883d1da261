#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "stratosim/simulate.hpp"

// The binary under test; the build injects its location.
#ifndef STRATOSIM_CLI_PATH
#error "STRATOSIM_CLI_PATH must point at the built executable"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_file(const char* tag) {
  static std::atomic<unsigned> counter{0};
  const unsigned id = counter++;
  return fs::temp_directory_path() /
         ("stratosim_cli_" + std::to_string(::getpid()) + "_" + tag + "_" +
          std::to_string(id));
}

RunResult run_cli(const std::string& args) {
  const fs::path out_path = scratch_file("out");
  const fs::path err_path = scratch_file("err");
  const std::string cmd = std::string(STRATOSIM_CLI_PATH) + " " + args + " > " +
                          out_path.string() + " 2> " + err_path.string();
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  fs::remove(out_path);
  fs::remove(err_path);
  return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("kernel eval prints a bare number") {
  RunResult unit = run_cli("kernel eval --kernel bifbm --H 0.25 --K 1 --s 1 --t 1");
  CHECK(unit.status == 0);
  CHECK(unit.out == "1\n");

  RunResult median = run_cli("kernel eval --kernel phi --phi median --s 1 --t 1");
  CHECK(median.status == 0);
  CHECK(median.out == "1.5707963267948966\n");
}

TEST_CASE("parse failures exit two with usage text") {
  RunResult missing = run_cli("kernel eval --kernel bifbm --s 1");
  CHECK(missing.status == 2);
  CHECK(missing.out.empty());
  CHECK(contains(missing.err, "--t"));

  RunResult unknown = run_cli("frobnicate");
  CHECK(unknown.status == 2);
}

TEST_CASE("runtime failures exit one with a diagnostic") {
  RunResult bad = run_cli("kernel eval --kernel nope --s 1 --t 1");
  CHECK(bad.status == 1);
  CHECK(contains(bad.err, "unknown family"));
}

TEST_CASE("constants report pins the headline coefficient") {
  RunResult r = run_cli("constants --which quantile-coef");
  CHECK(r.status == 0);
  CHECK(contains(r.out, "\"schema_version\":\"1\""));
  CHECK(contains(r.out, "quantile-coef"));
  CHECK(contains(r.out, "1.3436525720292"));
}

TEST_CASE("simulate writes deterministic csv") {
  const fs::path a = scratch_file("csv");
  const fs::path b = scratch_file("csv");
  const std::string base = "simulate --kernel bifbm --H 0.25 --K 1 --n 16 --paths 5 --seed 11 --out ";
  CHECK(run_cli(base + a.string()).status == 0);
  CHECK(run_cli(base + b.string()).status == 0);
  const std::string bytes = slurp(a);
  CHECK(bytes == slurp(b));
  CHECK(!bytes.empty());

  const stratosim::PathBatch batch = stratosim::read_csv_file(a.string());
  CHECK(batch.grid.n() == 16);
  CHECK(batch.values.rows() == 5);

  const fs::path c = scratch_file("csv");
  CHECK(run_cli("simulate --kernel bifbm --H 0.25 --K 1 --n 16 --paths 5 --seed 12 --out " +
                c.string())
            .status == 0);
  CHECK(slurp(c) != bytes);
  fs::remove(a);
  fs::remove(b);
  fs::remove(c);
}

TEST_CASE("experiment reports rerun byte-identical") {
  const std::string args =
      "clt --kernel brownian --function quadratic --n-list 8,16 --t-list 1 "
      "--paths 50 --seed 9 --eta zero";
  RunResult first = run_cli(args);
  RunResult second = run_cli(args);
  CHECK(first.status == 0);
  CHECK(first.out == second.out);
  for (const char* key : {"\"invocation\"", "\"ks_tables\"", "\"moments\"",
                          "\"limit_moments\"", "\"identity\"", "\"gates\""})
    CHECK(contains(first.out, key));
  // Timing blocks are opt-in precisely because they break rerun identity.
  CHECK(!contains(first.out, "\"timings\""));
}

TEST_CASE("config file supplies defaults and flags override them") {
  const fs::path conf = scratch_file("conf");
  {
    std::ofstream out(conf);
    out << "[clt]\n"
        << "function = quadratic\n"
        << "paths = 50\n"
        << "seed = 9\n";
  }
  RunResult r = run_cli("clt --config " + conf.string() +
                        " --kernel brownian --eta zero --n-list 8,16 --t-list 1 --paths 60");
  CHECK(r.status == 0);
  CHECK(contains(r.out, "\"function\":\"quadratic\""));
  CHECK(contains(r.out, "\"paths\":60"));
  CHECK(contains(r.out, "\"seed\":9"));

  const fs::path broken = scratch_file("conf");
  {
    std::ofstream out(broken);
    out << "no_such_option = 1\n";
  }
  RunResult bad = run_cli("clt --config " + broken.string() +
                          " --kernel brownian --eta zero --n-list 8 --t-list 1");
  CHECK(bad.status == 2);
  fs::remove(conf);
  fs::remove(broken);
}

TEST_CASE("audit gates its exit code on the verdict") {
  RunResult r = run_cli("audit --kernel brownian --grid-n 16,32");
  CHECK(r.status == 0);
  CHECK(contains(r.out, "\"pass\":true"));
}
