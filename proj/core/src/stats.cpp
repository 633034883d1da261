#include "stratosim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stratosim/errors.hpp"

namespace stratosim {

namespace {

void require_finite(const std::vector<double>& x, const char* who) {
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite entry");
}

double ks_lambda(double d, double effective_n) {
  const double root = std::sqrt(effective_n);
  return d * (root + 0.12 + 0.11 / root);
}

}  // namespace

double kolmogorov_tail(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double kPi = 3.141592653589793238462643383279502884;
  double q;
  if (lambda < 1.18) {
    // Dual theta form: 1 - Q converges in a few terms for small lambda.
    const double factor = std::sqrt(2.0 * kPi) / lambda;
    const double base = kPi * kPi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1;; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * base);
      sum += term;
      if (term < 1e-12) break;
    }
    q = 1.0 - factor * sum;
  } else {
    const double base = 2.0 * lambda * lambda;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1;; ++k) {
      const double term = std::exp(-base * k * k);
      sum += sign * term;
      sign = -sign;
      if (term < 1e-12) break;
    }
    q = 2.0 * sum;
  }
  return std::clamp(q, 0.0, 1.0);
}

KSResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw EmptySample("ks_two_sample: empty sample");
  require_finite(x, "ks_two_sample");
  require_finite(y, "ks_two_sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double m = static_cast<double>(x.size());
  const double n = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / m - static_cast<double>(j) / n));
  }
  KSResult result;
  result.statistic = d;
  result.size_x = x.size();
  result.size_y = y.size();
  result.effective_n = m * n / (m + n);
  result.p_value = kolmogorov_tail(ks_lambda(d, result.effective_n));
  return result;
}

KSResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw EmptySample("ks_one_sample: empty sample");
  require_finite(x, "ks_one_sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    if (!(f >= 0.0 && f <= 1.0))
      throw std::invalid_argument("ks_one_sample: cdf value outside [0,1]");
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KSResult result;
  result.statistic = d;
  result.size_x = x.size();
  result.size_y = 0;
  result.effective_n = n;
  result.p_value = kolmogorov_tail(ks_lambda(d, n));
  return result;
}

MomentSummary moment_summary(const std::vector<double>& x) {
  if (x.size() < 2) throw SampleTooSmall("moment_summary: need at least two entries");
  require_finite(x, "moment_summary");
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  MomentSummary out;
  out.count = x.size();
  out.mean = mean;
  out.variance = m2 * n / (n - 1.0);
  out.se_mean = std::sqrt(out.variance / n);
  out.se_variance = out.variance * std::sqrt(2.0 / (n - 1.0));
  out.shape_defined = x.size() >= 4 && m2 > 0.0;
  if (out.shape_defined) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
  }
  return out;
}

DecayFit decay_fit(const std::vector<long>& n_list, const std::vector<double>& variances) {
  if (n_list.size() != variances.size())
    throw std::invalid_argument("decay_fit: mismatched list lengths");
  if (n_list.size() < 3) throw SampleTooSmall("decay_fit: need at least three points");
  for (double v : variances)
    if (!(v > 0.0)) throw NonPositiveVariance("decay_fit: variance entries must be positive");
  const double n = static_cast<double>(n_list.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw std::invalid_argument("decay_fit: mesh sizes must be positive");
    const double lx = std::log(static_cast<double>(n_list[i]));
    const double ly = std::log(variances[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  // Repeated mesh sizes leave rounding noise rather than an exact zero.
  const double denom = n * sxx - sx * sx;
  if (std::fabs(denom) <= 1e-9 * std::max(1.0, n * sxx))
    throw std::invalid_argument("decay_fit: degenerate mesh list");
  DecayFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const double lx = std::log(static_cast<double>(n_list[i]));
    const double res = std::log(variances[i]) - (fit.intercept + fit.slope * lx);
    rss += res * res;
  }
  fit.residual_norm = std::sqrt(rss);
  fit.n_values = n_list;
  return fit;
}

}  // namespace stratosim
