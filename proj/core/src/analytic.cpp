#include "stratosim/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stratosim/errors.hpp"

namespace stratosim {

double gaussian_density(double x) {
  return 0.3989422804014326779399460599343819 * std::exp(-0.5 * x * x);
}

double heat_kernel(double t, double x) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: t must be positive");
  return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}

double gaussian_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244008443621048490);
}

double orthant_prob(double corr) {
  if (!(corr >= -1.0 && corr <= 1.0))
    throw std::invalid_argument("orthant_prob: correlation outside [-1, 1]");
  return 0.25 + std::asin(corr) / (2.0 * kPi);
}

namespace {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double value;
  double error;
};

PanelResult gauss_kronrod(const std::function<double(double)>& fn, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = fn(c - h * kXgk[i]);
    fv[14 - i] = fn(c + h * kXgk[i]);
  }
  fv[7] = fn(c);
  double kronrod = 0.0;
  for (int i = 0; i < 7; ++i) kronrod += kWgk[i] * (fv[i] + fv[14 - i]);
  kronrod += kWgk[7] * fv[7];
  double gauss = kWg[3] * fv[7];
  for (int i = 0; i < 3; ++i) gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  kronrod *= h;
  gauss *= h;
  return {kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

double integrate(const std::function<double(double)>& fn, double a, double b,
                 const QuadratureOptions& opt) {
  if (a == b) return 0.0;
  const double sign = a < b ? 1.0 : -1.0;
  const double lo0 = std::min(a, b), hi0 = std::max(a, b);
  const double total_len = hi0 - lo0;

  struct Panel {
    double lo, hi;
  };
  std::vector<Panel> stack{{lo0, hi0}};
  double sum = 0.0;
  double comp = 0.0;  // Kahan carry: panel counts can get large
  int used = 0;

  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    if (++used > opt.max_panels)
      throw QuadratureFailure("integrate: panel budget exhausted (abs_tol=" +
                              std::to_string(opt.abs_tol) + ")");
    const PanelResult r = gauss_kronrod(fn, p.lo, p.hi);
    const double local_tol = opt.abs_tol * (p.hi - p.lo) / total_len;
    const double width = p.hi - p.lo;
    const double mid = 0.5 * (p.lo + p.hi);
    const bool splittable = mid > p.lo && mid < p.hi;
    if (r.error <= local_tol || r.error <= 1e-300 || !splittable) {
      const double y = r.value - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    } else {
      stack.push_back({p.lo, mid});
      stack.push_back({mid, p.hi});
    }
  }
  return sign * sum;
}

double find_root(const std::function<double(double)>& fn, double x0, double step,
                 const RootOptions& opt) {
  if (!(step > 0.0)) throw std::invalid_argument("find_root: step must be positive");
  double f0 = fn(x0);
  if (std::abs(f0) <= opt.f_tol) return x0;

  // Expand outward by doubling until the sign changes.
  double lo = x0, hi = x0, flo = f0, fhi = f0;
  double h = step;
  bool bracketed = false;
  for (int i = 0; i < opt.max_expand && !bracketed; ++i) {
    const double left = x0 - h, right = x0 + h;
    const double fl = fn(left), fr = fn(right);
    if (std::abs(fl) <= opt.f_tol) return left;
    if (std::abs(fr) <= opt.f_tol) return right;
    if ((fl < 0.0) != (f0 < 0.0)) {
      lo = left, hi = x0, flo = fl, fhi = f0;
      bracketed = true;
    } else if ((fr < 0.0) != (f0 < 0.0)) {
      lo = x0, hi = right, flo = f0, fhi = fr;
      bracketed = true;
    }
    h *= 2.0;
  }
  if (!bracketed) throw RootNotBracketed("find_root: no sign change within expanded bracket");

  // Bisection/secant hybrid: secant when its candidate lands strictly inside
  // the bracket, bisection otherwise.
  for (int i = 0; i < opt.max_iter; ++i) {
    double x;
    const double denom = fhi - flo;
    if (denom != 0.0) {
      x = hi - fhi * (hi - lo) / denom;
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    } else {
      x = 0.5 * (lo + hi);
    }
    const double fx = fn(x);
    if (std::abs(fx) <= opt.f_tol || hi - lo <= opt.x_tol * (1.0 + std::abs(x)))
      return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace stratosim
