#pragma once

#include <vector>

#include "stratosim/kernels.hpp"

namespace testsupport {

// Straight Kahan sums of the gap series, no tail bound logic. Used to
// cross-check the production truncation rule against a much longer sum.
double brute_series_a(long terms);
double brute_series_b1(long terms);
double brute_series_b2(long terms);

struct QuadraticMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Exact mean and variance of the midpoint sum for f(x) = x^2 / 2 via the
// Gaussian product-moment expansion, independent of the sampler. Block j
// pairs mesh steps 2j-1 and 2j; kernels that are not pinned at the origin
// have their time-zero column aliased to the first lattice time, matching
// the path layout.
QuadraticMoments quadratic_phi_moments(const stratosim::CovarianceKernel& kernel,
                                       long n, double t);

// Quadratic-time sup distance between the two empirical CDFs, scanning every
// pooled sample point with right-continuous steps.
double ks_distance_brute(std::vector<double> x, std::vector<double> y);

double normal_cdf(double x);

}  // namespace testsupport
