#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "stratosim/constants.hpp"
#include "stratosim/kernels.hpp"
#include "stratosim/matrix.hpp"
#include "stratosim/partition.hpp"
#include "stratosim/rng.hpp"

namespace stratosim {

/// Sampled driving-process paths on a partition. Row p is one path; column i
/// holds the value at lattice time i/n. Column 0 is the path start: zero for
/// kernels pinned at the origin, otherwise a copy of the first grid value
/// (families whose covariance is given away from zero start at time 1/n and
/// treat that value as the initial one).
struct PathBatch {
  Partition grid;
  Matrix values;
  std::string kernel_name;
  std::uint64_t seed = 0;
  double jitter_used = 0.0;

  std::size_t num_paths() const { return values.rows(); }
  double at(std::size_t path, long index) const {
    return values(path, static_cast<std::size_t>(index));
  }
};

/// Independent centered Gaussian increments with Var = eta(t_{k+1}) - eta(t_k);
/// column k spans [k/n, (k+1)/n].
struct CorrectionBatch {
  Partition grid;
  Matrix increments;
  std::string eta_description;
  std::uint64_t seed = 0;

  std::size_t num_paths() const { return increments.rows(); }
};

/// Kernel values at lattice times 1/n .. size()/n (time zero excluded).
/// Exact and symmetric by construction; size() is capped at 8192.
Matrix build_cov_matrix(const CovarianceKernel& kernel, const Partition& grid,
                        int threads = 0);

struct Factorization {
  Matrix lower;
  double jitter_used = 0.0;
};

/// Cholesky factor of matrix + jitter * I, taking the smallest jitter from
/// {0, 1e-14, 1e-12, 1e-10} * max-diagonal that succeeds.
/// Throws NotPositiveDefinite when every level fails.
Factorization factorize(const Matrix& matrix);

/// Draws num_paths rows of lower * z with z standard normal from the stream
/// (seed, purpose, stream_base + path). Identical output for any worker count.
PathBatch sample_paths(const Factorization& factor, const CovarianceKernel& kernel,
                       const Partition& grid, std::size_t num_paths, std::uint64_t seed,
                       rng::StreamPurpose purpose = rng::StreamPurpose::GaussianPaths,
                       std::uint64_t stream_base = 0, int threads = 0);

/// build_cov_matrix + factorize + sample_paths in one step.
PathBatch simulate_paths(const CovarianceKernel& kernel, const Partition& grid,
                         std::size_t num_paths, std::uint64_t seed,
                         rng::StreamPurpose purpose = rng::StreamPurpose::GaussianPaths,
                         std::uint64_t stream_base = 0, int threads = 0);

/// Correction increments for the time-changed Brownian term. The stream
/// purpose is fixed to Corrections, so these are independent of every path
/// batch by construction. Throws NonMonotoneEta if some increment of eta is
/// below -1e-12; tinier negatives are clamped to zero variance.
CorrectionBatch sample_correction(const EtaModel& model, const Partition& grid,
                                  std::size_t num_paths, std::uint64_t seed,
                                  std::uint64_t stream_base = 0, int threads = 0);

/// CSV round trip. The header row holds the lattice times, each row one path;
/// floats are printed with 17 significant digits so values survive exactly.
/// Batch metadata (kernel name, seed, jitter) is not part of the format.
void write_csv(const PathBatch& batch, std::ostream& out);
PathBatch read_csv(std::istream& in);
void write_csv_file(const PathBatch& batch, const std::string& path);
PathBatch read_csv_file(const std::string& path);

}  // namespace stratosim
