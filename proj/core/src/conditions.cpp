#include "stratosim/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stratosim/errors.hpp"
#include "stratosim/parallel.hpp"

namespace stratosim {

double increment_cov(const CovarianceKernel& kernel, double t, double s, double r) {
  if (!(s > 0.0)) throw std::invalid_argument("increment_cov: s must be positive");
  if (s > t || s > r)
    throw std::invalid_argument("increment_cov: an increment reaches below time zero");
  return kernel.cov(t, r) - kernel.cov(t, r - s) - kernel.cov(t - s, r) +
         kernel.cov(t - s, r - s);
}

double beta_n(const CovarianceKernel& kernel, long n, long j, long k) {
  if (n < 1) throw std::invalid_argument("beta_n: n must be positive");
  if (j < 0 || k < 0) throw std::invalid_argument("beta_n: negative interval index");
  const double s = 1.0 / static_cast<double>(n);
  return increment_cov(kernel, static_cast<double>(j + 1) * s, s,
                       static_cast<double>(k + 1) * s);
}

LatticeCov::LatticeCov(const CovarianceKernel& kernel, Partition grid, int threads)
    : grid_(grid), table_(static_cast<std::size_t>(grid.size()) + 1) {
  if (grid_.size() > 8192)
    throw std::invalid_argument("LatticeCov: partition exceeds the 8192-step cap");
  parallel_for(
      static_cast<std::size_t>(grid_.size()) + 1,
      [&](std::size_t i) {
        const double ti = grid_.time(static_cast<long>(i));
        for (std::size_t j = 0; j <= i; ++j)
          table_.at(i, j) = kernel.cov(ti, grid_.time(static_cast<long>(j)));
      },
      threads < 0 ? 1u : static_cast<unsigned>(threads));
}

namespace {

void kahan_add(double& sum, double& comp, double term) {
  const double y = term - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

/// Index gaps audited between lattice pairs: every gap up to 8, then a sparse
/// geometric ladder. Keeps audits near O(size log size) points.
std::vector<long> audit_gaps(long m) {
  std::vector<long> gaps;
  for (long g = 0; g <= m && g <= 8; ++g) gaps.push_back(g);
  for (long g = 12; g <= m; g += (g + 1) / 2) gaps.push_back(g);
  return gaps;
}

struct FitAccum {
  double fitted = 0.0;
  GridPoint worst;
  long points = 0;
  long boundary = 0;

  void add(double lhs, double shape, const GridPoint& p, bool boundary_hit) {
    ++points;
    if (boundary_hit) ++boundary;
    const double ratio = std::fabs(lhs) / shape;
    if (ratio > fitted) {
      fitted = ratio;
      worst = p;
    }
  }
};

void fit_variance_growth(const LatticeCov& table, FitAccum& acc) {
  const Partition& grid = table.grid();
  const double s = 1.0 / static_cast<double>(grid.n());
  const double shape = std::sqrt(s);
  for (long i = 1; i <= grid.size(); ++i)
    acc.add(table.increment(i - 1, i - 1), shape, {s, grid.time(i), grid.time(i), 0}, false);
}

void fit_separated_increments(const LatticeCov& table, const ConditionExponents& e,
                              FitAccum& acc) {
  const Partition& grid = table.grid();
  const long m = grid.size();
  const double s = 1.0 / static_cast<double>(grid.n());
  // Symmetric in (t, r): audit r < t only. Domain: 2s <= r, t and t - r >= 2s.
  for (long g : audit_gaps(m)) {
    if (g < 2) continue;
    for (long j = 2; j + g <= m; ++j) {
      const long i = j + g;
      const double t = grid.time(i);
      const double r = grid.time(j);
      const double sep = t - r;
      const double shape = s * s * std::pow(sep, -e.alpha) * std::pow(r - s, -e.beta) +
                           s * s * std::pow(sep, -1.5);
      acc.add(table.increment(i - 1, j - 1), shape, {s, t, r, 0}, g == 2 || j == 2);
    }
  }
}

void fit_second_difference(const LatticeCov& table, FitAccum& acc) {
  const Partition& grid = table.grid();
  const long m = grid.size();
  const double s = 1.0 / static_cast<double>(grid.n());
  const double near_shape = std::sqrt(s);
  for (long g : audit_gaps(m)) {
    for (int sign = 0; sign < (g == 0 ? 1 : 2); ++sign) {
      for (long j = 1; j + 1 <= m; ++j) {
        const long i = sign == 0 ? j + g : j - g;
        if (i < 1 || i > m) continue;
        const double t = grid.time(i);
        const double r = grid.time(j);
        const double lhs = table.cov(i, j + 1) - 2.0 * table.cov(i, j) + table.cov(i, j - 1);
        const bool near = j < 2 || g < 2;
        const double shape =
            near ? near_shape
                 : s * s * (std::pow(r - s, -1.5) + std::pow(std::fabs(t - r), -1.5));
        acc.add(lhs, shape, {s, t, r, near ? 0 : 1}, j == 2 || g == 2);
      }
    }
  }
}

void fit_symmetric_difference(const LatticeCov& table, const ConditionExponents& e,
                              FitAccum& acc) {
  const Partition& grid = table.grid();
  const long m = grid.size();
  const double s = 1.0 / static_cast<double>(grid.n());
  const double near_shape = std::sqrt(s);

  // Part 0: the straddled point is the observed one.
  for (long i = 1; i + 1 <= m; ++i) {
    const double t = grid.time(i);
    const double lhs = table.cov(i, i + 1) - table.cov(i, i - 1);
    const bool near = i < 2;
    const double shape = near ? near_shape : s * std::pow(t - s, -0.5);
    acc.add(lhs, shape, {s, t, t, 0}, i == 2);
  }

  // Part 1: straddle at t, observe at a different lattice point r.
  for (long g : audit_gaps(m)) {
    if (g == 0) continue;
    for (int sign = 0; sign < 2; ++sign) {
      for (long i = 1; i + 1 <= m; ++i) {
        const long j = sign == 0 ? i + g : i - g;
        if (j < 1 || j > m) continue;
        const double t = grid.time(i);
        const double r = grid.time(j);
        const double lhs = table.cov(j, i + 1) - table.cov(j, i - 1);
        const bool near = i < 2 || g < 2;
        const double shape =
            near ? near_shape
                 : s * std::pow(t - s, -0.5) + s * std::pow(std::fabs(t - r), -0.5);
        acc.add(lhs, shape, {s, t, r, 1}, i == 2 || g == 2);
      }
    }
  }

  // Part 2: observe at time s itself, increment ending at t > 2s.
  for (long i = 3; i <= m; ++i) {
    const double t = grid.time(i);
    const double lhs = table.cov(1, i) - table.cov(1, i - 1);
    const double shape = std::pow(s, 0.5 + e.gamma) * std::pow(t - 2.0 * s, -e.gamma);
    acc.add(lhs, shape, {s, t, s, 2}, false);
  }
}

void finalize(ConditionReport& report) {
  const std::size_t k = report.fits.size();
  const double fine = report.fits[k - 1].fitted;
  const double coarse = report.fits[k - 2].fitted;
  if (fine == 0.0 && coarse == 0.0)
    report.growth_ratio = 1.0;
  else if (coarse == 0.0)
    report.growth_ratio = std::numeric_limits<double>::infinity();
  else
    report.growth_ratio = fine / coarse;
  report.pass = report.growth_ratio <= 1.25;
}

std::vector<long> sorted_resolutions(const std::vector<long>& grid_n) {
  if (grid_n.size() < 2)
    throw std::invalid_argument("audit: need at least two resolutions");
  std::vector<long> sorted = grid_n;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 1) throw std::invalid_argument("audit: resolutions must be positive");
  return sorted;
}

}  // namespace

EtaEstimate eta_estimate(const LatticeCov& table, double t) {
  const Partition& grid = table.grid();
  const long b = grid.blocks(t);
  EtaEstimate est;
  est.n = grid.n();
  est.t = t;
  double plus = 0.0, cp = 0.0, minus = 0.0, cm = 0.0;
  for (long j = 1; j <= b; ++j) {
    for (long k = 1; k <= b; ++k) {
      const double odd = table.increment(2 * j - 1, 2 * k - 1);
      const double even = table.increment(2 * j - 2, 2 * k - 2);
      kahan_add(plus, cp, odd * odd + even * even);
      const double lo = table.increment(2 * j - 2, 2 * k - 1);
      const double hi = table.increment(2 * j - 1, 2 * k - 2);
      kahan_add(minus, cm, lo * lo + hi * hi);
    }
  }
  est.plus = plus;
  est.minus = minus;
  est.value = plus - minus;
  return est;
}

double eta_n_plus(const LatticeCov& table, double t) { return eta_estimate(table, t).plus; }
double eta_n_minus(const LatticeCov& table, double t) { return eta_estimate(table, t).minus; }

double beta_moment_ratio(const LatticeCov& table, double t, int moment) {
  if (moment != 1 && moment != 2)
    throw std::invalid_argument("beta_moment_ratio: moment must be 1 or 2");
  const Partition& grid = table.grid();
  const long b = grid.blocks(t);
  if (b < 1) throw std::invalid_argument("beta_moment_ratio: no complete block before t");
  double sum = 0.0, comp = 0.0;
  for (long j = 1; j <= b; ++j) {
    for (long k = 1; k <= b; ++k) {
      const double v(std::fabs(table.increment(2 * j - 1, 2 * k - 1)));
      const double w(std::fabs(table.increment(2 * j - 2, 2 * k - 2)));
      const double x(std::fabs(table.increment(2 * j - 2, 2 * k - 1)));
      const double y(std::fabs(table.increment(2 * j - 1, 2 * k - 2)));
      if (moment == 1)
        kahan_add(sum, comp, v + w + x + y);
      else
        kahan_add(sum, comp, v * v + w * w + x * x + y * y);
    }
  }
  const double scale = static_cast<double>(b) *
                       std::pow(static_cast<double>(grid.n()), -0.5 * moment);
  return sum / scale;
}

void validate_exponents(const ConditionExponents& e) {
  if (!(e.alpha > 1.0) || !(e.alpha <= 1.5))
    throw std::invalid_argument("exponents: alpha must lie in (1, 3/2]");
  if (std::fabs(e.alpha + e.beta - 1.5) > 1e-12)
    throw std::invalid_argument("exponents: alpha + beta must equal 3/2");
  if (!(e.gamma > 0.0)) throw std::invalid_argument("exponents: gamma must be positive");
}

ConditionExponents default_exponents(const CovarianceKernel& kernel) {
  ConditionExponents e;
  if (const auto* b = dynamic_cast<const BifractionalKernel*>(&kernel)) {
    // K = 1 has no position term, so the bare 3/2 separation decay suffices.
    if (b->params().K < 1.0) {
      const double a = 0.5 + 2.0 * b->params().H;
      if (a > 1.0 && a < 1.5) {
        e.alpha = a;
        e.beta = 1.5 - a;
      }
    }
  }
  validate_exponents(e);
  return e;
}

std::string condition_name(Condition c) {
  switch (c) {
    case Condition::VarianceGrowth: return "variance-growth";
    case Condition::SeparatedIncrements: return "separated-increments";
    case Condition::SecondDifference: return "second-difference";
    case Condition::SymmetricDifference: return "symmetric-difference";
  }
  throw std::invalid_argument("condition_name: unknown condition");
}

Condition parse_condition(const std::string& name) {
  for (Condition c : all_conditions())
    if (condition_name(c) == name) return c;
  throw std::invalid_argument("unknown condition '" + name +
                              "' (expected variance-growth, separated-increments, "
                              "second-difference, or symmetric-difference)");
}

const std::vector<Condition>& all_conditions() {
  static const std::vector<Condition> all = {
      Condition::VarianceGrowth,
      Condition::SeparatedIncrements,
      Condition::SecondDifference,
      Condition::SymmetricDifference,
  };
  return all;
}

ResolutionFit fit_condition(const LatticeCov& table, Condition c, const ConditionExponents& e) {
  validate_exponents(e);
  FitAccum acc;
  switch (c) {
    case Condition::VarianceGrowth: fit_variance_growth(table, acc); break;
    case Condition::SeparatedIncrements: fit_separated_increments(table, e, acc); break;
    case Condition::SecondDifference: fit_second_difference(table, acc); break;
    case Condition::SymmetricDifference: fit_symmetric_difference(table, e, acc); break;
  }
  ResolutionFit fit;
  fit.n = table.grid().n();
  fit.fitted = acc.fitted;
  fit.worst = acc.worst;
  fit.points = acc.points;
  fit.boundary_hits = acc.boundary;
  return fit;
}

ConditionReport audit_condition(const CovarianceKernel& kernel, Condition c,
                                const ConditionExponents& exponents,
                                const std::vector<long>& grid_n, double horizon,
                                int threads) {
  const std::vector<long> sorted = sorted_resolutions(grid_n);
  ConditionReport report;
  report.condition = c;
  report.exponents = exponents;
  for (long n : sorted) {
    LatticeCov table(kernel, Partition(n, horizon), threads);
    report.fits.push_back(fit_condition(table, c, exponents));
  }
  finalize(report);
  return report;
}

std::vector<ConditionReport> audit_all(const CovarianceKernel& kernel,
                                       const ConditionExponents& exponents,
                                       const std::vector<long>& grid_n, double horizon,
                                       int threads) {
  const std::vector<long> sorted = sorted_resolutions(grid_n);
  std::vector<ConditionReport> reports;
  for (Condition c : all_conditions()) {
    ConditionReport r;
    r.condition = c;
    r.exponents = exponents;
    reports.push_back(std::move(r));
  }
  for (long n : sorted) {
    LatticeCov table(kernel, Partition(n, horizon), threads);
    for (std::size_t i = 0; i < reports.size(); ++i)
      reports[i].fits.push_back(fit_condition(table, all_conditions()[i], exponents));
  }
  for (ConditionReport& r : reports) finalize(r);
  return reports;
}

}  // namespace stratosim
