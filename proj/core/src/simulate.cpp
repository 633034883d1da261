#include "stratosim/simulate.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stratosim/errors.hpp"
#include "stratosim/parallel.hpp"

namespace stratosim {

namespace {

unsigned worker_cap(int threads) { return threads < 0 ? 1u : static_cast<unsigned>(threads); }

bool try_cholesky(const Matrix& a, double jitter, Matrix& lower) {
  const std::size_t m = a.rows();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a(i, j) + (i == j ? jitter : 0.0);
      const double* li = lower.row(i);
      const double* lj = lower.row(j);
      for (std::size_t k = 0; k < j; ++k) sum -= li[k] * lj[k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        lower(i, i) = std::sqrt(sum);
      } else {
        lower(i, j) = sum / lower(j, j);
      }
    }
  }
  return true;
}

}  // namespace

Matrix build_cov_matrix(const CovarianceKernel& kernel, const Partition& grid, int threads) {
  const long m = grid.size();
  if (m > 8192) throw std::invalid_argument("build_cov_matrix: partition exceeds the 8192-step cap");
  Matrix out(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
  parallel_for(
      static_cast<std::size_t>(m),
      [&](std::size_t i) {
        const double ti = grid.time(static_cast<long>(i) + 1);
        for (std::size_t j = 0; j <= i; ++j)
          out(i, j) = kernel.cov(ti, grid.time(static_cast<long>(j) + 1));
      },
      worker_cap(threads));
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = i + 1; j < out.cols(); ++j) out(i, j) = out(j, i);
  return out;
}

Factorization factorize(const Matrix& matrix) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("factorize: matrix is not square");
  const std::size_t m = matrix.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    max_diag = std::max(max_diag, std::fabs(matrix(i, i)));
    for (std::size_t j = 0; j < i; ++j)
      if (std::fabs(matrix(i, j) - matrix(j, i)) >
          1e-12 * std::max(1.0, std::fabs(matrix(i, j))))
        throw std::invalid_argument("factorize: matrix is not symmetric");
  }
  for (double level : {0.0, 1e-14, 1e-12, 1e-10}) {
    const double jitter = level * max_diag;
    Matrix lower(m, m);
    if (try_cholesky(matrix, jitter, lower)) return {std::move(lower), jitter};
  }
  throw NotPositiveDefinite(
      "factorize: not positive definite at any jitter level; the kernel is invalid or its "
      "quadrature too coarse");
}

PathBatch sample_paths(const Factorization& factor, const CovarianceKernel& kernel,
                       const Partition& grid, std::size_t num_paths, std::uint64_t seed,
                       rng::StreamPurpose purpose, std::uint64_t stream_base, int threads) {
  const std::size_t m = factor.lower.rows();
  if (m != static_cast<std::size_t>(grid.size()))
    throw GridMismatch("sample_paths: factor size does not match the partition");
  PathBatch batch{grid, Matrix(num_paths, m + 1), kernel.name(), seed, factor.jitter_used};
  const bool pinned = kernel.zero_at_origin();
  const Matrix& lower = factor.lower;
  parallel_for(
      num_paths,
      [&](std::size_t p) {
        rng::NormalStream stream(seed, purpose, stream_base + p);
        std::vector<double> z(m);
        for (std::size_t k = 0; k < m; ++k) z[k] = stream.normal(k);
        double* row = batch.values.row(p);
        for (std::size_t i = 0; i < m; ++i) {
          const double* li = lower.row(i);
          double acc = 0.0;
          for (std::size_t j = 0; j <= i; ++j) acc += li[j] * z[j];
          row[i + 1] = acc;
        }
        row[0] = pinned ? 0.0 : row[1];
      },
      worker_cap(threads));
  return batch;
}

PathBatch simulate_paths(const CovarianceKernel& kernel, const Partition& grid,
                         std::size_t num_paths, std::uint64_t seed,
                         rng::StreamPurpose purpose, std::uint64_t stream_base, int threads) {
  const Factorization factor = factorize(build_cov_matrix(kernel, grid, threads));
  return sample_paths(factor, kernel, grid, num_paths, seed, purpose, stream_base, threads);
}

CorrectionBatch sample_correction(const EtaModel& model, const Partition& grid,
                                  std::size_t num_paths, std::uint64_t seed,
                                  std::uint64_t stream_base, int threads) {
  const long m = grid.size();
  std::vector<double> eta(static_cast<std::size_t>(m) + 1);
  for (long i = 0; i <= m; ++i) eta[static_cast<std::size_t>(i)] = eta_eval(model, grid.time(i));
  std::vector<double> sigma(static_cast<std::size_t>(m));
  for (long k = 0; k < m; ++k) {
    const double step = eta[static_cast<std::size_t>(k) + 1] - eta[static_cast<std::size_t>(k)];
    if (step < -1e-12)
      throw NonMonotoneEta("sample_correction: eta decreases by " + std::to_string(-step) +
                           " over a mesh step");
    sigma[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, step));
  }
  CorrectionBatch batch{grid, Matrix(num_paths, static_cast<std::size_t>(m)),
                        model.description, seed};
  parallel_for(
      num_paths,
      [&](std::size_t p) {
        rng::NormalStream stream(seed, rng::StreamPurpose::Corrections, stream_base + p);
        double* row = batch.increments.row(p);
        for (long k = 0; k < m; ++k)
          row[k] = sigma[static_cast<std::size_t>(k)] * stream.normal(static_cast<std::uint64_t>(k));
      },
      worker_cap(threads));
  return batch;
}

namespace {

void append_fields(std::ostream& out, const double* values, std::size_t count) {
  char buf[40];
  for (std::size_t i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    if (i) out << ',';
    out << buf;
  }
  out << '\n';
}

std::vector<double> parse_fields(const std::string& line, std::size_t lineno) {
  std::vector<double> out;
  const char* cursor = line.c_str();
  while (true) {
    char* stop = nullptr;
    const double v = std::strtod(cursor, &stop);
    if (stop == cursor)
      throw CsvParseError("csv line " + std::to_string(lineno) + ": expected a number");
    out.push_back(v);
    cursor = stop;
    while (*cursor == ' ') ++cursor;
    if (*cursor == '\0') break;
    if (*cursor != ',')
      throw CsvParseError("csv line " + std::to_string(lineno) + ": expected a comma");
    ++cursor;
  }
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

void write_csv(const PathBatch& batch, std::ostream& out) {
  const long m = batch.grid.size();
  std::vector<double> times(static_cast<std::size_t>(m) + 1);
  for (long i = 0; i <= m; ++i) times[static_cast<std::size_t>(i)] = batch.grid.time(i);
  append_fields(out, times.data(), times.size());
  for (std::size_t p = 0; p < batch.num_paths(); ++p)
    append_fields(out, batch.values.row(p), times.size());
}

PathBatch read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvParseError("csv: empty input");
  strip_cr(line);
  const std::vector<double> times = parse_fields(line, 1);
  if (times.size() < 3 || times[0] != 0.0)
    throw CsvParseError("csv header must list lattice times starting at 0");
  if (!(times[1] > 0.0)) throw CsvParseError("csv header times must increase");
  const long n = std::lround(1.0 / times[1]);
  if (n < 1) throw CsvParseError("csv header mesh is not a unit fraction");
  Partition grid(n, times.back());
  if (static_cast<std::size_t>(grid.size()) + 1 != times.size())
    throw CsvParseError("csv header length does not match its mesh");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::fabs(times[i] - grid.time(static_cast<long>(i))) > 1e-9)
      throw CsvParseError("csv header time " + std::to_string(i) + " is off the lattice");

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    rows.push_back(parse_fields(line, lineno));
    if (rows.back().size() != times.size())
      throw CsvParseError("csv line " + std::to_string(lineno) + ": expected " +
                          std::to_string(times.size()) + " fields, got " +
                          std::to_string(rows.back().size()));
  }
  PathBatch batch{grid, Matrix(rows.size(), times.size()), "", 0, 0.0};
  for (std::size_t p = 0; p < rows.size(); ++p) {
    double* row = batch.values.row(p);
    for (std::size_t i = 0; i < times.size(); ++i) row[i] = rows[p][i];
  }
  return batch;
}

void write_csv_file(const PathBatch& batch, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(batch, out);
  out.flush();
  if (!out.good()) throw std::runtime_error("short write: " + path);
}

PathBatch read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return read_csv(in);
}

}  // namespace stratosim
