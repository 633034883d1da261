#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace stratosim {

enum class KernelFamily { Bifractional, Phi, Quantile };

std::string family_name(KernelFamily f);

/// Polymorphic handle used by the condition audits, the eta sums, and the
/// simulator. cov must be symmetric and positive semidefinite on [0, T]^2.
class CovarianceKernel {
 public:
  virtual ~CovarianceKernel() = default;
  virtual double cov(double s, double t) const = 0;
  virtual std::string name() const = 0;
  virtual KernelFamily family() const = 0;
  /// True when the process starts at a deterministic 0 at t = 0.
  virtual bool zero_at_origin() const { return true; }
};

// ---------------------------------------------------------------------------
// Bifractional family

struct BifBmParams {
  double H = 0.5;  // in (0, 1]
  double K = 1.0;  // in (0, 1]
};

/// (1/2^K) ((t^{2H} + s^{2H})^K - |t - s|^{2HK}); exactly 0 when s or t is 0.
double bifbm_cov(const BifBmParams& p, double s, double t);

/// The mesh variance scaling HK = 1/4 (with H <= 1/2) required by the
/// midpoint limit theorem for this family.
bool bifbm_clt_valid(const BifBmParams& p);

class BifractionalKernel final : public CovarianceKernel {
 public:
  explicit BifractionalKernel(BifBmParams p);
  double cov(double s, double t) const override;
  std::string name() const override;
  KernelFamily family() const override { return KernelFamily::Bifractional; }
  const BifBmParams& params() const { return params_; }
  bool clt_valid() const { return bifbm_clt_valid(params_); }
  bool is_brownian() const;

 private:
  BifBmParams params_;
};

// ---------------------------------------------------------------------------
// Phi family: E[F_r F_t] = (r & t) * phi((r | t) / (r & t))

struct PhiKernelSpec {
  std::string name;
  std::function<double(double)> phi;   // on [1, inf)
  std::function<double(double)> phi1;  // phi' on (1, inf)
  std::function<double(double)> phi2;  // phi'' on (1, inf)
  double kappa = 0.0;                  // singular coefficient of phi' at 1+
  std::function<double(double)> psi;   // bounded part: phi'(x) = kappa/sqrt(x-1) + psi(x)/sqrt(x)
  // Certified envelope constants (validated by check_phi_spec):
  double c_phi0 = 0.0;  // sup |phi|
  double c_phi1 = 0.0;  // sup |phi'(x)| sqrt(x-1)
  double c_phi2 = 0.0;  // sup |phi''(x)| sqrt(x) (x-1)^{3/2}
  double c_psi0 = 0.0;  // sup |psi|
  double c_psi1 = 0.0;  // sup |psi'(1+x)| sqrt(x)
};

/// Scaled-median process: phi(x) = sqrt(x) arctan(1/sqrt(x-1)), kappa = -1/2.
PhiKernelSpec median_phi_spec();

/// Named phi specs ("median").
PhiKernelSpec phi_spec(const std::string& name);

double phi_cov(const PhiKernelSpec& spec, double s, double t);

struct PhiSpecCheck {
  double sup_phi = 0.0;
  double sup_phi1_shape = 0.0;     // |phi'(x)| sqrt(x-1)
  double sup_phi2_shape = 0.0;     // |phi''(x)| sqrt(x) (x-1)^{3/2}
  double sup_psi = 0.0;
  double sup_psi1_shape = 0.0;     // |psi'(1+x)| sqrt(x), central differences
  double max_residual = 0.0;       // |phi' - kappa/sqrt(x-1) - psi/sqrt(x)|
  double max_phi1_fd_error = 0.0;  // phi1 vs finite difference of phi
  double max_phi2_fd_error = 0.0;  // phi2 vs finite difference of phi1
  bool within_bounds = false;      // all sups below the declared constants
};

/// Samples `points` log-spaced abscissae in (1, x_max] and checks the declared
/// envelope constants, the derivative fields, and the kappa/psi decomposition.
PhiSpecCheck check_phi_spec(const PhiKernelSpec& spec, int points = 1000,
                            double x_max = 1e6);

class PhiProcessKernel final : public CovarianceKernel {
 public:
  explicit PhiProcessKernel(PhiKernelSpec spec);
  double cov(double s, double t) const override;
  std::string name() const override;
  KernelFamily family() const override { return KernelFamily::Phi; }
  const PhiKernelSpec& spec() const { return spec_; }

 private:
  PhiKernelSpec spec_;
};

// ---------------------------------------------------------------------------
// Quantile family: F(t) = empirical-quantile fluctuation of B(t) = B(0) + W(t),
// B(0) ~ init_density, normalized by the density at the alpha-quantile.

struct QuantileKernelSpec {
  std::string name;  // density registry name, for provenance
  std::function<double(double)> init_density;
  double alpha = 0.5;
  double quad_tol = 1e-10;   // absolute quadrature tolerance
  double domain_cut = 12.0;  // density support truncated to [-domain_cut, domain_cut]
};

/// Standard normal initial density (support cut at +-12 sigma).
QuantileKernelSpec normal_quantile_spec(double alpha = 0.5);
/// Uniform density on [-half_width, half_width].
QuantileKernelSpec uniform_quantile_spec(double alpha = 0.5, double half_width = 1.0);
/// Named density registry ("normal", "uniform").
QuantileKernelSpec quantile_spec(const std::string& density, double alpha = 0.5);

/// Marginal density u(x, t) = integral of init_density(y) p(t, x - y) dy;
/// u(x, 0) = init_density(x).
double density_u(const QuantileKernelSpec& spec, double x, double t);

/// alpha-quantile q(t) of u(., t): solves the smoothed CDF equation to 1e-12.
double quantile_q(const QuantileKernelSpec& spec, double t);

/// Normalized quantile-process covariance rho(r, t); finite for r, t >= 0.
double quantile_cov(const QuantileKernelSpec& spec, double r, double t);

class QuantileProcessKernel final : public CovarianceKernel {
 public:
  explicit QuantileProcessKernel(QuantileKernelSpec spec);
  double cov(double r, double t) const override;
  std::string name() const override;
  KernelFamily family() const override { return KernelFamily::Quantile; }
  bool zero_at_origin() const override { return false; }

  double density_u(double x, double t) const;
  double quantile(double t) const;  // q(t), memoized per t
  double theta(double t) const;     // 1 / u(q(t), t), memoized per t
  const QuantileKernelSpec& spec() const { return spec_; }

 private:
  struct PointData {
    double q;
    double u_at_q;
  };
  PointData point(double t) const;

  QuantileKernelSpec spec_;
  mutable std::mutex mu_;
  mutable std::map<double, PointData> memo_;
};

// ---------------------------------------------------------------------------

/// CLI-facing factory. family: "bifbm" | "brownian" | "phi" | "quantile".
struct KernelRequest {
  std::string family;
  double H = 0.25;
  double K = 1.0;
  std::string phi = "median";
  std::string density = "normal";
  double alpha = 0.5;
  double quad_tol = 1e-10;
  double domain_cut = 12.0;
};

std::unique_ptr<CovarianceKernel> make_kernel(const KernelRequest& req);

}  // namespace stratosim
