#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace stratosim {

struct KSResult {
  double statistic = 0.0;  // sup gap between the two empirical CDFs, in [0,1]
  double p_value = 1.0;
  std::size_t size_x = 0;
  std::size_t size_y = 0;
  double effective_n = 0.0;  // m n / (m + n); n for one-sample tests
};

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
/// evaluated through the dual theta form for small lambda where the direct
/// series alternates slowly. Terms below 1e-12 are dropped.
double kolmogorov_tail(double lambda);

/// Two-sample test; ties are consumed from both samples before each gap read.
/// p uses Q at lambda = D (sqrt(Ne) + 0.12 + 0.11 / sqrt(Ne)).
KSResult ks_two_sample(std::vector<double> x, std::vector<double> y);

/// One-sample test against a nondecreasing CDF.
KSResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);

struct MomentSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;     // unbiased
  double se_mean = 0.0;      // sqrt(variance / count)
  double se_variance = 0.0;  // variance * sqrt(2 / (count - 1)), Gaussian working model
  bool shape_defined = false;
  double skewness = 0.0;  // third standardized moment; zero when undefined
  double kurtosis = 0.0;  // fourth standardized moment, not excess
};

/// Needs at least two entries; shape statistics need four and are flagged
/// undefined for constant samples.
MomentSummary moment_summary(const std::vector<double>& x);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;
  std::vector<long> n_values;
};

/// Least-squares line through (log n, log variance); at least three points,
/// all variances positive.
DecayFit decay_fit(const std::vector<long>& n_list, const std::vector<double>& variances);

}  // namespace stratosim
