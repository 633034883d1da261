#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stratosim/constants.hpp"
#include "stratosim/kernels.hpp"
#include "stratosim/simulate.hpp"

namespace stratosim {

/// A test function with its first three derivatives. remainder_integral, when
/// set, evaluates the weighted third-derivative integral of (anchor - u)^2 *
/// f3(u) over [lo, hi] in closed form; block remainders fall back to adaptive
/// quadrature otherwise.
struct TestFunction {
  std::string label;
  std::function<double(double)> f;
  std::function<double(double)> f1;
  std::function<double(double)> f2;
  std::function<double(double)> f3;
  std::function<double(double /*anchor*/, double /*lo*/, double /*hi*/)> remainder_integral;
};

/// Built-in registry: "quadratic" (x^2/2), "cubic" (x^3), "sin". The registry
/// is closed; every entry has moderate growth in all derivatives.
const TestFunction& test_function(const std::string& label);
std::vector<std::string> test_function_labels();

/// Max over probe points of |derivative - centered difference| scaled by
/// 1 + |derivative|, across the three derivative pairs.
double derivative_residual(const TestFunction& tf);

/// Weighted remainder integral of one Taylor block; closed form when the test
/// function provides one, otherwise quadrature.
double block_remainder_integral(const TestFunction& tf, double anchor, double lo, double hi);

/// Per-path scalars of the midpoint decomposition at fixed (n, t).
struct BlockDecomposition {
  double phi = 0.0;             // midpoint Riemann sum
  double psi = 0.0;             // second-order block sum
  double remainder = 0.0;       // aggregated third-order remainders
  double boundary_value = 0.0;  // f at the last complete block endpoint
  double delta = 0.0;           // f(W_t) - f(W_0) - psi/2 + remainder
  double delta_boundary = 0.0;  // same with the block endpoint; equals phi exactly
};

/// Midpoint Riemann sum over complete two-step blocks up to t; zero when no
/// block fits.
double phi_n(const PathBatch& paths, std::size_t path, const TestFunction& tf, double t);

/// Second-order sum: f2 at block midpoints times the difference of squared
/// half-increments, (upper - mid)^2 - (mid - lower)^2.
double psi_n(const PathBatch& paths, std::size_t path, const TestFunction& tf, double t);

/// Aggregated third-order Taylor remainders over the blocks up to t.
double taylor_remainders(const PathBatch& paths, std::size_t path, const TestFunction& tf,
                         double t);

/// Assembles the full decomposition; t must sit on the lattice.
BlockDecomposition delta_n(const PathBatch& paths, std::size_t path, const TestFunction& tf,
                           double t);

/// One draw of the limit law: f(W_t) - f(W_0) - (1/2) sum f2(W_{t_k}) dB_k
/// over mesh steps with t_k < t (left-point evaluation).
double limit_law_sample(const PathBatch& paths, const CorrectionBatch& correction,
                        std::size_t path, const TestFunction& tf, double t);

struct CltConfig {
  std::vector<long> n_list;     // ascending meshes
  std::vector<double> t_list;   // evaluation times in (0, horizon]
  std::size_t num_paths = 0;
  std::uint64_t seed = 0;
  double horizon = 1.0;
  int threads = 0;
};

/// Samples of the midpoint sum at one (n, t), with per-path diagnostics.
struct CltCell {
  long n = 0;
  double t = 0.0;
  std::vector<double> phi;
  std::vector<double> w_t;                // driving-path value at t, for joint statistics
  std::vector<double> identity_residual;  // |phi - delta_boundary|
  std::vector<double> boundary_gap;       // f(W_t) - f(block endpoint)
};

/// Samples of the limit law at one t, drawn at the finest mesh from paths and
/// corrections on streams disjoint from every midpoint-sum batch.
struct LimitCell {
  double t = 0.0;
  std::vector<double> sample;
  std::vector<double> w_t;
};

struct CltResult {
  std::vector<CltCell> cells;        // n-major, then t in t_list order
  std::vector<LimitCell> limit;      // t_list order
  std::vector<double> jitter_per_n;  // factorization jitter for each mesh
  double limit_jitter = 0.0;
};

/// Runs the full experiment: fresh paths per mesh, midpoint sums at each t,
/// and limit-law samples at the finest mesh under the supplied eta model.
CltResult clt_experiment(const CovarianceKernel& kernel, const TestFunction& tf,
                         const EtaModel& eta, const CltConfig& config);

}  // namespace stratosim
