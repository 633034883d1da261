#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "stratosim/constants.hpp"
#include "stratosim/errors.hpp"
#include "stratosim/kernels.hpp"
#include "stratosim/simulate.hpp"
#include "stratosim/stats.hpp"
#include "support/oracles.hpp"

using namespace stratosim;

namespace {

std::vector<double> column(const PathBatch& batch, long index) {
  std::vector<double> out(batch.num_paths());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = batch.at(p, index);
  return out;
}

double sample_cov(const std::vector<double>& x, const std::vector<double>& y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("covariance matrix excludes time zero and pins hand values") {
  Partition grid(2, 1.0);
  auto brownian = make_kernel({.family = "brownian"});
  const Matrix mb = build_cov_matrix(*brownian, grid);
  REQUIRE(mb.rows() == 2);
  REQUIRE(mb.cols() == 2);
  CHECK(mb(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mb(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mb(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mb(1, 1) == doctest::Approx(1.0).epsilon(1e-15));

  auto fbm = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  const Matrix mf = build_cov_matrix(*fbm, grid);
  CHECK(mf(0, 0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(mf(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mf(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mf(0, 1) == mf(1, 0));
}

TEST_CASE("factorization reproduces hand cholesky factors") {
  Matrix id(2, 2);
  id(0, 0) = 1.0;
  id(1, 1) = 1.0;
  const Factorization fi = factorize(id);
  CHECK(fi.jitter_used == 0.0);
  CHECK(fi.lower(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fi.lower(1, 0) == doctest::Approx(0.0).scale(1.0));
  CHECK(fi.lower(1, 1) == doctest::Approx(1.0).epsilon(1e-15));

  Matrix m(2, 2);
  m(0, 0) = 0.5;
  m(0, 1) = 0.5;
  m(1, 0) = 0.5;
  m(1, 1) = 1.0;
  const Factorization f = factorize(m);
  const double r = std::sqrt(0.5);
  CHECK(f.jitter_used == 0.0);
  CHECK(f.lower(0, 0) == doctest::Approx(r).epsilon(1e-14));
  CHECK(f.lower(1, 0) == doctest::Approx(r).epsilon(1e-14));
  CHECK(f.lower(1, 1) == doctest::Approx(r).epsilon(1e-14));
  CHECK(f.lower(0, 1) == 0.0);
}

TEST_CASE("factorization rejects indefinite input and jitters near-singular input") {
  Matrix bad(2, 2);
  bad(0, 0) = 1.0;
  bad(0, 1) = 2.0;
  bad(1, 0) = 2.0;
  bad(1, 1) = 1.0;
  CHECK_THROWS_AS((void)factorize(bad), NotPositiveDefinite);

  // Singular PSD rank-one matrix needs a small diagonal bump.
  Matrix flat(2, 2);
  flat(0, 0) = 1.0;
  flat(0, 1) = 1.0;
  flat(1, 0) = 1.0;
  flat(1, 1) = 1.0;
  const Factorization f = factorize(flat);
  CHECK(f.jitter_used >= 0.0);
  CHECK(f.jitter_used <= 1e-10);
  // Factor still reproduces the matrix to the jitter scale.
  const double recon = f.lower(1, 0) * f.lower(1, 0) + f.lower(1, 1) * f.lower(1, 1);
  CHECK(recon == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("path batches are deterministic and thread-count independent") {
  auto fbm = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  Partition grid(16, 1.0);
  const PathBatch a = simulate_paths(*fbm, grid, 8, 42);
  const PathBatch b = simulate_paths(*fbm, grid, 8, 42);
  const PathBatch c = simulate_paths(*fbm, grid, 8, 42, rng::StreamPurpose::GaussianPaths, 0, 4);
  REQUIRE(a.num_paths() == 8);
  for (std::size_t p = 0; p < 8; ++p) {
    for (long i = 0; i <= grid.size(); ++i) {
      CHECK(a.at(p, i) == b.at(p, i));
      CHECK(a.at(p, i) == c.at(p, i));
    }
  }
  const PathBatch other_seed = simulate_paths(*fbm, grid, 8, 43);
  CHECK(a.at(0, grid.size()) != other_seed.at(0, grid.size()));
  const PathBatch other_stream =
      simulate_paths(*fbm, grid, 8, 42, rng::StreamPurpose::GaussianPaths, 100);
  CHECK(a.at(0, grid.size()) != other_stream.at(0, grid.size()));
}

TEST_CASE("start column is pinned to zero or aliased to the first time") {
  Partition grid(8, 1.0);
  auto fbm = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  const PathBatch pinned = simulate_paths(*fbm, grid, 4, 7);
  for (std::size_t p = 0; p < 4; ++p) CHECK(pinned.at(p, 0) == 0.0);

  auto quant = make_kernel({.family = "quantile", .density = "uniform", .alpha = 0.4});
  const PathBatch late = simulate_paths(*quant, grid, 4, 7);
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(late.at(p, 0) == late.at(p, 1));
    CHECK(late.at(p, 1) != 0.0);
  }
}

TEST_CASE("sampled covariances match the kernel within monte carlo error") {
  const std::size_t paths = 5000;
  Partition grid(64, 1.0);
  const std::vector<long> idx{16, 32, 64};

  auto check_kernel = [&](const CovarianceKernel& kernel) {
    const PathBatch batch = simulate_paths(kernel, grid, paths, 2024);
    for (long i : idx) {
      for (long j : idx) {
        const auto x = column(batch, i);
        const auto y = column(batch, j);
        const double rxx = kernel.cov(grid.time(i), grid.time(i));
        const double ryy = kernel.cov(grid.time(j), grid.time(j));
        const double rxy = kernel.cov(grid.time(i), grid.time(j));
        const double se = std::sqrt((rxx * ryy + rxy * rxy) / static_cast<double>(paths));
        CHECK(std::fabs(sample_cov(x, y) - rxy) <= 4.0 * se);
      }
    }
  };
  check_kernel(*make_kernel({.family = "brownian"}));
  check_kernel(*make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0}));
  check_kernel(*make_kernel({.family = "phi", .phi = "median"}));
}

TEST_CASE("terminal marginals are gaussian") {
  auto fbm = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  Partition grid(32, 1.0);
  const PathBatch batch = simulate_paths(*fbm, grid, 4000, 99);
  std::vector<double> z = column(batch, grid.size());
  const double sd = std::sqrt(fbm->cov(1.0, 1.0));
  for (double& v : z) v /= sd;
  const KSResult ks = ks_one_sample(z, testsupport::normal_cdf);
  CHECK(ks.p_value > 0.01);

  const MomentSummary mom = moment_summary(column(batch, grid.size()));
  CHECK(std::fabs(mom.variance - 1.0) < 0.05);
  CHECK(std::fabs(mom.mean) < 4.0 * mom.se_mean);
}

TEST_CASE("empty batches are well-formed") {
  auto k = make_kernel({.family = "brownian"});
  Partition grid(4, 1.0);
  const PathBatch batch = simulate_paths(*k, grid, 0, 1);
  CHECK(batch.num_paths() == 0);
  CHECK(batch.kernel_name == "brownian");
}

TEST_CASE("correction increments follow the eta clock") {
  Partition grid(16, 1.0);
  const CorrectionBatch zeros = sample_correction(zero_eta_model(), grid, 10, 5);
  for (std::size_t p = 0; p < 10; ++p)
    for (long k = 0; k < grid.size(); ++k) CHECK(zeros.increments(p, k) == 0.0);

  // Linear clock: each increment has variance 1/n.
  EtaModel linear{"t", [](double t) { return t; }};
  const CorrectionBatch lin = sample_correction(linear, grid, 6000, 11);
  std::vector<double> last(lin.num_paths());
  std::vector<double> total(lin.num_paths(), 0.0);
  for (std::size_t p = 0; p < lin.num_paths(); ++p) {
    last[p] = lin.increments(p, grid.size() - 1);
    for (long k = 0; k < grid.size(); ++k) total[p] += lin.increments(p, k);
  }
  const MomentSummary step = moment_summary(last);
  CHECK(std::fabs(step.variance - 1.0 / 16.0) < 5.0 * step.se_variance);
  const MomentSummary sum = moment_summary(total);
  CHECK(std::fabs(sum.variance - 1.0) < 5.0 * sum.se_variance);

  // Quadratic clock: increment k has variance (t_{k+1}^2 - t_k^2).
  EtaModel quad{"t^2", [](double t) { return t * t; }};
  const CorrectionBatch qb = sample_correction(quad, grid, 6000, 12);
  std::vector<double> first(qb.num_paths());
  for (std::size_t p = 0; p < qb.num_paths(); ++p) first[p] = qb.increments(p, 0);
  const MomentSummary fs = moment_summary(first);
  CHECK(std::fabs(fs.variance - 1.0 / 256.0) < 5.0 * fs.se_variance);

  EtaModel shrinking{"-t", [](double t) { return -t; }};
  CHECK_THROWS_AS((void)sample_correction(shrinking, grid, 2, 1), NonMonotoneEta);
}

TEST_CASE("corrections are independent of path batches sharing a seed") {
  auto fbm = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  Partition grid(8, 1.0);
  const std::size_t paths = 20000;
  const PathBatch w = simulate_paths(*fbm, grid, paths, 77);
  const EtaModel model = eta_model_for(*fbm);
  const CorrectionBatch b = sample_correction(model, grid, paths, 77);

  std::vector<double> wt = column(w, grid.size());
  std::vector<double> bt(paths, 0.0);
  for (std::size_t p = 0; p < paths; ++p)
    for (long k = 0; k < grid.size(); ++k) bt[p] += b.increments(p, k);

  const double var_w = sample_cov(wt, wt);
  const double var_b = sample_cov(bt, bt);
  const double corr = sample_cov(wt, bt) / std::sqrt(var_w * var_b);
  CHECK(std::fabs(corr) < 4.0 / std::sqrt(static_cast<double>(paths)));
  CHECK(var_b == doctest::Approx(model.eta(1.0)).epsilon(0.08));
}

TEST_CASE("csv round trip is bitwise exact") {
  auto fbm = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  Partition grid(8, 1.0);
  const PathBatch batch = simulate_paths(*fbm, grid, 5, 3);

  std::stringstream io;
  write_csv(batch, io);
  const PathBatch back = read_csv(io);
  REQUIRE(back.num_paths() == 5);
  CHECK(back.grid.n() == 8);
  CHECK(back.grid.size() == 8);
  for (std::size_t p = 0; p < 5; ++p)
    for (long i = 0; i <= 8; ++i) CHECK(back.at(p, i) == batch.at(p, i));
}

TEST_CASE("csv reader tolerates CRLF and blank trailing lines") {
  std::stringstream io;
  io << "0,0.5,1\r\n";
  io << "0,0.25,-1.5\r\n";
  io << "\n";
  io << "0,0.125,2.25\n";
  const PathBatch batch = read_csv(io);
  REQUIRE(batch.num_paths() == 2);
  CHECK(batch.grid.n() == 2);
  CHECK(batch.at(0, 2) == -1.5);
  CHECK(batch.at(1, 1) == 0.125);
}

TEST_CASE("csv reader rejects malformed input") {
  const auto expect_throw = [](const std::string& text) {
    std::stringstream io(text);
    CHECK_THROWS_AS((void)read_csv(io), CsvParseError);
  };
  expect_throw("");
  expect_throw("0.5,1\n0,0\n");              // header must start at 0
  expect_throw("0,0.5,1\n0,1\n");            // short row
  expect_throw("0,0.5,1\n0,abc,1\n");        // non-numeric field
  expect_throw("0,0.5,1,1.6\n0,0,0,0\n");    // header off the lattice
  expect_throw("0,-0.5,-1\n0,0,0\n");        // times must increase
}
