#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace testsupport {
namespace {

double kahan_sum(long terms, double (*term)(long)) {
  double sum = 0.0;
  double carry = 0.0;
  for (long m = 1; m <= terms; ++m) {
    const double y = term(m) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double second_diff_sq(double center) {
  const double d = std::sqrt(center + 1.0) - 2.0 * std::sqrt(center) +
                   std::sqrt(center - 1.0);
  return d * d;
}

double a_term(long m) { return second_diff_sq(2.0 * static_cast<double>(m)); }
double b1_term(long m) { return second_diff_sq(2.0 * static_cast<double>(m) + 1.0); }
double b2_term(long m) { return second_diff_sq(2.0 * static_cast<double>(m) - 1.0); }

}  // namespace

double brute_series_a(long terms) { return kahan_sum(terms, a_term); }
double brute_series_b1(long terms) { return kahan_sum(terms, b1_term); }
double brute_series_b2(long terms) { return kahan_sum(terms, b2_term); }

QuadraticMoments quadratic_phi_moments(const stratosim::CovarianceKernel& kernel,
                                       long n, double t) {
  const long blocks = static_cast<long>(std::floor(
      static_cast<double>(n) * t / 2.0 + 1e-9));
  QuadraticMoments out;
  if (blocks == 0) return out;

  // Lattice time of index i, with index 0 aliased for late-start kernels.
  const auto time_of = [&](long i) {
    if (i == 0 && !kernel.zero_at_origin()) i = 1;
    return static_cast<double>(i) / static_cast<double>(n);
  };
  const auto cov_idx = [&](long i, long j) {
    const double ti = time_of(i);
    const double tj = time_of(j);
    if (ti == 0.0 || tj == 0.0) return 0.0;
    return kernel.cov(ti, tj);
  };

  std::vector<long> lo(blocks), mid(blocks), hi(blocks);
  for (long j = 0; j < blocks; ++j) {
    lo[j] = 2 * j;
    mid[j] = 2 * j + 1;
    hi[j] = 2 * j + 2;
  }

  // f'(x) = x, so the sum is sum_j X_j Y_j with X_j the midpoint value and
  // Y_j the block increment. For centered jointly Gaussian factors:
  //   E[X_j Y_j]            = C(j, j)
  //   Cov(X_jY_j, X_kY_k)   = A(j,k) B(j,k) + C(j,k) C(k,j)
  // with A the midpoint covariance, B the increment covariance, and
  // C(j,k) = E[X_j Y_k].
  const auto C = [&](long j, long k) {
    return cov_idx(mid[j], hi[k]) - cov_idx(mid[j], lo[k]);
  };

  double mean = 0.0;
  for (long j = 0; j < blocks; ++j) mean += C(j, j);

  double var = 0.0;
  for (long j = 0; j < blocks; ++j) {
    for (long k = 0; k < blocks; ++k) {
      const double A = cov_idx(mid[j], mid[k]);
      const double B = cov_idx(hi[j], hi[k]) - cov_idx(hi[j], lo[k]) -
                       cov_idx(lo[j], hi[k]) + cov_idx(lo[j], lo[k]);
      var += A * B + C(j, k) * C(k, j);
    }
  }
  out.mean = mean;
  out.variance = var;
  return out;
}

double ks_distance_brute(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto ecdf = [](const std::vector<double>& s, double v) {
    const auto it = std::upper_bound(s.begin(), s.end(), v);
    return static_cast<double>(it - s.begin()) / static_cast<double>(s.size());
  };
  double d = 0.0;
  for (double v : pooled) d = std::max(d, std::fabs(ecdf(x, v) - ecdf(y, v)));
  return d;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace testsupport
