#include "stratosim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "stratosim/analytic.hpp"
#include "stratosim/errors.hpp"

namespace stratosim {

namespace {

// Heat-kernel tails are cut at this many standard deviations; the discarded
// mass is below 2e-32, far under every quadrature tolerance in use.
constexpr double kTailSigmas = 12.0;

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::Bifractional: return "bifbm";
    case KernelFamily::Phi: return "phi";
    case KernelFamily::Quantile: return "quantile";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Bifractional

double bifbm_cov(const BifBmParams& p, double s, double t) {
  if (!(p.H > 0.0 && p.H <= 1.0) || !(p.K > 0.0 && p.K <= 1.0))
    throw std::invalid_argument("bifbm_cov: requires H in (0,1], K in (0,1]");
  if (!(s >= 0.0 && t >= 0.0))
    throw std::invalid_argument("bifbm_cov: times must be nonnegative");
  if (s == 0.0 || t == 0.0) return 0.0;  // exact: the two power terms cancel
  const double sum_pow = std::pow(t, 2.0 * p.H) + std::pow(s, 2.0 * p.H);
  const double dist_pow = std::pow(std::abs(t - s), 2.0 * p.H * p.K);
  return (std::pow(sum_pow, p.K) - dist_pow) * std::exp2(-p.K);
}

bool bifbm_clt_valid(const BifBmParams& p) {
  return p.H <= 0.5 && std::abs(p.H * p.K - 0.25) <= 1e-12;
}

BifractionalKernel::BifractionalKernel(BifBmParams p) : params_(p) {
  if (!(p.H > 0.0 && p.H <= 1.0) || !(p.K > 0.0 && p.K <= 1.0))
    throw std::invalid_argument("BifractionalKernel: requires H in (0,1], K in (0,1]");
}

double BifractionalKernel::cov(double s, double t) const { return bifbm_cov(params_, s, t); }

std::string BifractionalKernel::name() const {
  if (is_brownian()) return "brownian";
  return "bifbm(H=" + format_param(params_.H) + ",K=" + format_param(params_.K) + ")";
}

bool BifractionalKernel::is_brownian() const {
  return params_.H == 0.5 && params_.K == 1.0;
}

// ---------------------------------------------------------------------------
// Phi family

PhiKernelSpec median_phi_spec() {
  PhiKernelSpec s;
  s.name = "median";
  s.phi = [](double x) {
    if (x < 1.0) throw std::invalid_argument("phi: x < 1");
    if (x == 1.0) return 0.5 * kPi;
    return std::sqrt(x) * std::atan(1.0 / std::sqrt(x - 1.0));
  };
  s.phi1 = [](double x) {
    const double sx = std::sqrt(x), sm = std::sqrt(x - 1.0);
    return std::atan(1.0 / sm) / (2.0 * sx) - 1.0 / (2.0 * sx * sm);
  };
  s.phi2 = [](double x) {
    const double sx = std::sqrt(x), sm = std::sqrt(x - 1.0);
    const double x32 = x * sx;
    const double prod32 = std::pow(x * (x - 1.0), 1.5);
    return -1.0 / (4.0 * x32 * sm) - std::atan(1.0 / sm) / (4.0 * x32) +
           (2.0 * x - 1.0) / (4.0 * prod32);
  };
  s.kappa = -0.5;
  s.psi = [](double x) {
    const double sx = std::sqrt(x), sm = std::sqrt(x - 1.0);
    return 0.5 * ((sx - 1.0) / sm + std::atan(1.0 / sm));
  };
  s.c_phi0 = 0.5 * kPi;  // sup is attained at x = 1
  s.c_phi1 = 0.55;
  s.c_phi2 = 0.50;
  s.c_psi0 = 0.80;
  s.c_psi1 = 0.20;
  return s;
}

PhiKernelSpec phi_spec(const std::string& name) {
  if (name == "median") return median_phi_spec();
  throw UnsupportedKernel("phi_spec: unknown phi kernel '" + name + "'");
}

double phi_cov(const PhiKernelSpec& spec, double s, double t) {
  if (!(s >= 0.0 && t >= 0.0))
    throw std::invalid_argument("phi_cov: times must be nonnegative");
  const double lo = std::min(s, t), hi = std::max(s, t);
  if (lo == 0.0) return 0.0;
  return lo * spec.phi(hi / lo);
}

PhiSpecCheck check_phi_spec(const PhiKernelSpec& spec, int points, double x_max) {
  if (points < 2) throw std::invalid_argument("check_phi_spec: need at least 2 points");
  PhiSpecCheck out;
  const double lo_gap = 1e-8, hi_gap = x_max - 1.0;
  const double log_lo = std::log(lo_gap), log_hi = std::log(hi_gap);
  for (int i = 0; i < points; ++i) {
    const double gap = std::exp(log_lo + (log_hi - log_lo) * i / (points - 1));
    const double x = 1.0 + gap;
    const double p0 = spec.phi(x), p1 = spec.phi1(x), p2 = spec.phi2(x);
    const double ps = spec.psi(x);
    out.sup_phi = std::max(out.sup_phi, std::abs(p0));
    out.sup_phi1_shape = std::max(out.sup_phi1_shape, std::abs(p1) * std::sqrt(gap));
    out.sup_phi2_shape =
        std::max(out.sup_phi2_shape, std::abs(p2) * std::sqrt(x) * std::pow(gap, 1.5));
    out.sup_psi = std::max(out.sup_psi, std::abs(ps));
    const double residual = p1 - spec.kappa / std::sqrt(gap) - ps / std::sqrt(x);
    out.max_residual = std::max(out.max_residual, std::abs(residual));

    const double h = 1e-5 * gap;
    if (x - h > 1.0) {
      const double fd1 = (spec.phi(x + h) - spec.phi(x - h)) / (2.0 * h);
      out.max_phi1_fd_error =
          std::max(out.max_phi1_fd_error, std::abs(fd1 - p1) / (1.0 + std::abs(p1)));
      const double fd2 = (spec.phi1(x + h) - spec.phi1(x - h)) / (2.0 * h);
      out.max_phi2_fd_error =
          std::max(out.max_phi2_fd_error, std::abs(fd2 - p2) / (1.0 + std::abs(p2)));
      const double psd = (spec.psi(x + h) - spec.psi(x - h)) / (2.0 * h);
      out.sup_psi1_shape = std::max(out.sup_psi1_shape, std::abs(psd) * std::sqrt(gap));
    }
  }
  out.sup_phi = std::max(out.sup_phi, std::abs(spec.phi(1.0)));
  out.within_bounds = out.sup_phi <= spec.c_phi0 + 1e-9 &&
                      out.sup_phi1_shape <= spec.c_phi1 &&
                      out.sup_phi2_shape <= spec.c_phi2 && out.sup_psi <= spec.c_psi0 &&
                      out.sup_psi1_shape <= spec.c_psi1;
  return out;
}

PhiProcessKernel::PhiProcessKernel(PhiKernelSpec spec) : spec_(std::move(spec)) {
  if (!spec_.phi) throw std::invalid_argument("PhiProcessKernel: phi is required");
}

double PhiProcessKernel::cov(double s, double t) const { return phi_cov(spec_, s, t); }

std::string PhiProcessKernel::name() const { return "phi(" + spec_.name + ")"; }

// ---------------------------------------------------------------------------
// Quantile family

QuantileKernelSpec normal_quantile_spec(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("normal_quantile_spec: alpha must lie in (0,1)");
  QuantileKernelSpec s;
  s.name = "normal";
  s.init_density = [](double y) { return gaussian_density(y); };
  s.alpha = alpha;
  s.domain_cut = 12.0;
  return s;
}

QuantileKernelSpec uniform_quantile_spec(double alpha, double half_width) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("uniform_quantile_spec: alpha must lie in (0,1)");
  if (!(half_width > 0.0))
    throw std::invalid_argument("uniform_quantile_spec: half_width must be positive");
  QuantileKernelSpec s;
  s.name = "uniform";
  const double density = 0.5 / half_width;
  const double hw = half_width;
  s.init_density = [density, hw](double y) {
    return (y >= -hw && y <= hw) ? density : 0.0;
  };
  s.alpha = alpha;
  s.domain_cut = half_width;
  return s;
}

QuantileKernelSpec quantile_spec(const std::string& density, double alpha) {
  if (density == "normal") return normal_quantile_spec(alpha);
  if (density == "uniform") return uniform_quantile_spec(alpha);
  throw UnsupportedKernel("quantile_spec: unknown init density '" + density + "'");
}

namespace {

QuadratureOptions quad_opts(double tol) {
  QuadratureOptions o;
  o.abs_tol = tol;
  return o;
}

/// CDF of the time-t marginal: integral of init_density(y) Phi((q - y)/sqrt(t)).
/// Fubini collapses the 2D integral of u to this single axis.
double marginal_cdf(const QuantileKernelSpec& spec, double q, double t) {
  const double cut = spec.domain_cut;
  if (t == 0.0) {
    if (q <= -cut) return 0.0;
    const double hi = std::min(q, cut);
    return integrate(spec.init_density, -cut, hi, quad_opts(spec.quad_tol));
  }
  const double rt = std::sqrt(t);
  return integrate(
      [&](double y) { return spec.init_density(y) * gaussian_cdf((q - y) / rt); }, -cut,
      cut, quad_opts(spec.quad_tol));
}

}  // namespace

double density_u(const QuantileKernelSpec& spec, double x, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("density_u: t must be nonnegative");
  if (t == 0.0) return spec.init_density(x);
  const double rt = std::sqrt(t);
  const double lo = std::max(-spec.domain_cut, x - kTailSigmas * rt);
  const double hi = std::min(spec.domain_cut, x + kTailSigmas * rt);
  if (hi <= lo) return 0.0;
  return integrate([&](double y) { return spec.init_density(y) * heat_kernel(t, x - y); },
                   lo, hi, quad_opts(spec.quad_tol));
}

double quantile_q(const QuantileKernelSpec& spec, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("quantile_q: t must be nonnegative");
  RootOptions ropt;
  ropt.f_tol = 1e-12;
  const double q0 =
      find_root([&](double q) { return marginal_cdf(spec, q, 0.0) - spec.alpha; }, 0.0,
                0.5 * std::max(spec.domain_cut, 1.0), ropt);
  if (t == 0.0) return q0;
  return find_root([&](double q) { return marginal_cdf(spec, q, t) - spec.alpha; }, q0,
                   std::max(std::sqrt(t), 0.25), ropt);
}

namespace {

/// P(B(r) <= q_r, B(t) <= q_t) - alpha^2, the unnormalized covariance.
/// Nested quadrature: outer axis integrates init_density, inner axis the heat
/// kernel against the Gaussian CDF of the independent bridge increment.
double joint_minus_alpha2(const QuantileKernelSpec& spec, double r, double t, double q_r,
                          double q_t, double alpha) {
  const double cut = spec.domain_cut;
  const double axis_tol = spec.quad_tol / std::sqrt(2.0);
  double joint;
  if (r == 0.0) {
    if (q_r <= -cut) {
      joint = 0.0;
    } else {
      const double rt = std::sqrt(t);
      joint = integrate(
          [&](double y) { return spec.init_density(y) * gaussian_cdf((q_t - y) / rt); },
          -cut, std::min(q_r, cut), quad_opts(spec.quad_tol));
    }
  } else {
    const double rs = std::sqrt(r);
    const double sigma = std::sqrt(t - r);
    const auto inner = [&](double y) {
      const double lo = y - kTailSigmas * rs;
      const double hi = std::min(q_r, y + kTailSigmas * rs);
      if (hi <= lo) return 0.0;
      return integrate(
          [&](double x) { return heat_kernel(r, x - y) * gaussian_cdf((q_t - x) / sigma); },
          lo, hi, quad_opts(axis_tol));
    };
    joint = integrate([&](double y) { return spec.init_density(y) * inner(y); }, -cut, cut,
                      quad_opts(axis_tol));
  }
  return joint - alpha * alpha;
}

}  // namespace

double quantile_cov(const QuantileKernelSpec& spec, double r, double t) {
  QuantileProcessKernel k(spec);
  return k.cov(r, t);
}

QuantileProcessKernel::QuantileProcessKernel(QuantileKernelSpec spec)
    : spec_(std::move(spec)) {
  if (!spec_.init_density)
    throw std::invalid_argument("QuantileProcessKernel: init_density is required");
  if (!(spec_.alpha > 0.0 && spec_.alpha < 1.0))
    throw std::invalid_argument("QuantileProcessKernel: alpha must lie in (0,1)");
}

QuantileProcessKernel::PointData QuantileProcessKernel::point(double t) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(t);
    if (it != memo_.end()) return it->second;
  }
  PointData d;
  d.q = quantile_q(spec_, t);
  d.u_at_q = stratosim::density_u(spec_, d.q, t);
  if (!(d.u_at_q > 0.0))
    throw KernelEvaluationFailure("quantile kernel: marginal density vanishes at its quantile");
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(t, d);
  return d;
}

double QuantileProcessKernel::cov(double r, double t) const {
  if (!(r >= 0.0 && t >= 0.0))
    throw std::invalid_argument("quantile cov: times must be nonnegative");
  if (r > t) std::swap(r, t);
  const PointData pr = point(r);
  const double alpha = spec_.alpha;
  if (r == t) return alpha * (1.0 - alpha) / (pr.u_at_q * pr.u_at_q);
  const PointData pt = point(t);
  const double num = joint_minus_alpha2(spec_, r, t, pr.q, pt.q, alpha);
  return num / (pr.u_at_q * pt.u_at_q);
}

std::string QuantileProcessKernel::name() const {
  return "quantile(" + spec_.name + ",alpha=" + format_param(spec_.alpha) + ")";
}

double QuantileProcessKernel::density_u(double x, double t) const {
  return stratosim::density_u(spec_, x, t);
}

double QuantileProcessKernel::quantile(double t) const { return point(t).q; }

double QuantileProcessKernel::theta(double t) const { return 1.0 / point(t).u_at_q; }

// ---------------------------------------------------------------------------

std::unique_ptr<CovarianceKernel> make_kernel(const KernelRequest& req) {
  if (req.family == "bifbm")
    return std::make_unique<BifractionalKernel>(BifBmParams{req.H, req.K});
  if (req.family == "brownian")
    return std::make_unique<BifractionalKernel>(BifBmParams{0.5, 1.0});
  if (req.family == "phi") return std::make_unique<PhiProcessKernel>(phi_spec(req.phi));
  if (req.family == "quantile") {
    QuantileKernelSpec spec = quantile_spec(req.density, req.alpha);
    spec.quad_tol = req.quad_tol;
    if (req.density == "normal") spec.domain_cut = req.domain_cut;
    return std::make_unique<QuantileProcessKernel>(std::move(spec));
  }
  throw UnsupportedKernel("make_kernel: unknown family '" + req.family + "'");
}

}  // namespace stratosim
