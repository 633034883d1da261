#pragma once

#include <string>
#include <vector>

#include "stratosim/kernels.hpp"
#include "stratosim/matrix.hpp"
#include "stratosim/partition.hpp"

namespace stratosim {

/// E[(W_t - W_{t-s})(W_r - W_{r-s})], expanded into four kernel evaluations.
/// Requires 0 < s <= min(t, r).
double increment_cov(const CovarianceKernel& kernel, double t, double s, double r);

/// Covariance of the mesh increments over [j/n, (j+1)/n] and [k/n, (k+1)/n].
double beta_n(const CovarianceKernel& kernel, long n, long j, long k);

/// Kernel values on the full lattice of a partition, computed once and shared
/// by the eta sums and all bound audits. Storage is size^2/2 doubles; the
/// partition size is capped at 8192.
class LatticeCov {
 public:
  LatticeCov(const CovarianceKernel& kernel, Partition grid, int threads = 0);

  const Partition& grid() const { return grid_; }
  double cov(long i, long j) const { return table_.at(i, j); }
  /// Increment covariance for 0-based mesh intervals j, k < grid().size().
  double increment(long j, long k) const {
    return table_.at(j + 1, k + 1) - table_.at(j + 1, k) - table_.at(j, k + 1) +
           table_.at(j, k);
  }

 private:
  Partition grid_;
  SymmetricPacked table_;
};

/// Partial sums of squared increment covariances over the block parity
/// patterns: `plus` pairs same-parity intervals, `minus` cross-parity ones.
struct EtaEstimate {
  long n = 0;
  double t = 0.0;
  double plus = 0.0;
  double minus = 0.0;
  double value = 0.0;  // plus - minus
};

EtaEstimate eta_estimate(const LatticeCov& table, double t);
double eta_n_plus(const LatticeCov& table, double t);
double eta_n_minus(const LatticeCov& table, double t);

/// Sum of |increment cov|^moment over the four parity patterns with block
/// indices 1..blocks(t), normalized by blocks(t) * n^{-moment/2}. Bounded in n
/// when increments decay at the square-root rate; moment is 1 or 2.
double beta_moment_ratio(const LatticeCov& table, double t, int moment);

struct ConditionExponents {
  double alpha = 1.5;  // in (1, 3/2]
  double beta = 0.0;   // alpha + beta = 3/2
  double gamma = 0.5;  // > 0
};

void validate_exponents(const ConditionExponents& e);

/// Audit exponents per kernel family; the bifractional family with K < 1
/// needs the position-term pair alpha = 1/2 + 2H, beta = 1 - 2H.
ConditionExponents default_exponents(const CovarianceKernel& kernel);

/// The four covariance bound shapes audited numerically.
enum class Condition {
  VarianceGrowth,       // increment variance against sqrt(s)
  SeparatedIncrements,  // two well-separated increments
  SecondDifference,     // value against a symmetric second difference
  SymmetricDifference,  // value against a straddling difference (three parts)
};

std::string condition_name(Condition c);
Condition parse_condition(const std::string& name);
const std::vector<Condition>& all_conditions();

/// A grid point audited for one condition; `part` tags the sub-case matched
/// (piecewise bounds list their near case as part 0).
struct GridPoint {
  double s = 0.0;
  double t = 0.0;
  double r = 0.0;
  int part = 0;
};

struct ResolutionFit {
  long n = 0;
  double fitted = 0.0;  // max over the grid of |lhs| / bound shape
  GridPoint worst;
  long points = 0;
  long boundary_hits = 0;  // case-predicate equalities, resolved first-match
};

/// Verdict semantics: an honest bound keeps the fitted constant stable as the
/// mesh refines, so pass means the finest-to-next-finest growth is <= 1.25.
struct ConditionReport {
  Condition condition = Condition::VarianceGrowth;
  ConditionExponents exponents;
  std::vector<ResolutionFit> fits;  // ascending n
  double growth_ratio = 1.0;
  bool pass = false;
};

/// Fit one condition on a prebuilt lattice table.
ResolutionFit fit_condition(const LatticeCov& table, Condition c, const ConditionExponents& e);

ConditionReport audit_condition(const CovarianceKernel& kernel, Condition c,
                                const ConditionExponents& exponents,
                                const std::vector<long>& grid_n, double horizon = 1.0,
                                int threads = 0);

/// All four audits sharing one lattice table per resolution.
std::vector<ConditionReport> audit_all(const CovarianceKernel& kernel,
                                       const ConditionExponents& exponents,
                                       const std::vector<long>& grid_n, double horizon = 1.0,
                                       int threads = 0);

}  // namespace stratosim
