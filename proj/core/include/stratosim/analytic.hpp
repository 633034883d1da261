#pragma once

#include <functional>

namespace stratosim {

inline constexpr double kPi = 3.141592653589793238462643383279503;

/// Standard normal density.
double gaussian_density(double x);

/// Heat kernel p(t, x) = (2 pi t)^{-1/2} exp(-x^2 / (2t)), t > 0.
double heat_kernel(double t, double x);

/// Standard normal CDF, absolute error below 1e-12 everywhere.
double gaussian_cdf(double x);

/// P(X <= 0, Y <= 0) for standard bivariate normal with correlation `corr`:
/// 1/4 + arcsin(corr) / (2 pi). Requires |corr| <= 1.
double orthant_prob(double corr);

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_panels = 4000;
};

/// Adaptive integration of fn over [a, b]: embedded Gauss(7)/Kronrod(15) rule
/// with bisection, absolute stopping rule. Throws QuadratureFailure when the
/// panel budget is exhausted before the tolerance is met.
double integrate(const std::function<double(double)>& fn, double a, double b,
                 const QuadratureOptions& opt = {});

struct RootOptions {
  double f_tol = 1e-12;     // stop when |fn(x)| <= f_tol
  double x_tol = 1e-15;     // or the bracket is this narrow
  int max_iter = 200;
  int max_expand = 64;      // bracket-doubling attempts
};

/// Finds x with fn(x) = 0 starting from x0: expands a bracket outward by
/// doubling steps of initial half-width `step`, then closes in with a
/// bisection/secant hybrid. Requires fn nondecreasing trend across the root
/// only in the sense that a sign change exists; throws RootNotBracketed when
/// doubling never encloses one.
double find_root(const std::function<double(double)>& fn, double x0, double step,
                 const RootOptions& opt = {});

}  // namespace stratosim
