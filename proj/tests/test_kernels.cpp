#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "stratosim/analytic.hpp"
#include "stratosim/errors.hpp"
#include "stratosim/kernels.hpp"

using namespace stratosim;

TEST_CASE("bifractional covariance pins known values") {
  BifBmParams p{0.25, 1.0};
  CHECK(bifbm_cov(p, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bifbm_cov(p, 0.0, 1.0) == 0.0);
  CHECK(bifbm_cov(p, 1.0, 0.0) == 0.0);
  CHECK(bifbm_cov(p, 0.0, 0.0) == 0.0);
  // Symmetry on a handful of off-diagonal points.
  for (double s : {0.1, 0.37, 0.8}) {
    for (double t : {0.2, 0.55, 1.0}) {
      CHECK(bifbm_cov(p, s, t) == doctest::Approx(bifbm_cov(p, t, s)).epsilon(1e-15));
    }
  }
}

TEST_CASE("brownian special case is the min kernel") {
  BifractionalKernel k({0.5, 1.0});
  CHECK(k.is_brownian());
  CHECK(k.cov(0.3, 0.7) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(k.cov(0.9, 0.4) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(k.cov(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(k.clt_valid());

  BifractionalKernel fbm({0.25, 1.0});
  CHECK_FALSE(fbm.is_brownian());
  CHECK(fbm.clt_valid());
}

TEST_CASE("mesh-scaling predicate accepts exactly HK = 1/4 with H <= 1/2") {
  CHECK(bifbm_clt_valid({0.25, 1.0}));
  CHECK(bifbm_clt_valid({0.375, 2.0 / 3.0}));
  CHECK(bifbm_clt_valid({0.5, 0.5}));
  CHECK_FALSE(bifbm_clt_valid({0.5, 1.0}));
  CHECK_FALSE(bifbm_clt_valid({0.25, 0.9}));
  CHECK_FALSE(bifbm_clt_valid({0.75, 1.0 / 3.0}));  // H > 1/2
}

TEST_CASE("valid bifractional kernels have square-root increment scale") {
  // Var(W_t - W_s) for HK = 1/4 behaves like 2^{1-K} |t - s|^{1/2} near the
  // diagonal.
  for (const BifBmParams& p :
       {BifBmParams{0.25, 1.0}, BifBmParams{0.375, 2.0 / 3.0}}) {
    BifractionalKernel k(p);
    const double scale = std::exp2(1.0 - p.K);
    const double t = 0.6;
    for (double h : {1e-3, 1e-4, 1e-5}) {
      const double v = k.cov(t, t) - 2.0 * k.cov(t, t + h) + k.cov(t + h, t + h);
      CHECK(v / std::sqrt(h) == doctest::Approx(scale).epsilon(0.02));
    }
  }
}

TEST_CASE("median kernel matches the arcsin form") {
  const PhiKernelSpec& spec = median_phi_spec();
  CHECK(spec.kappa == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(spec.phi(1.0) == doctest::Approx(kPi / 2.0).epsilon(1e-15));

  // E[F_s F_t] = sqrt(s t) arcsin(min / sqrt(s t)) written through phi.
  auto k = make_kernel({.family = "phi", .phi = "median"});
  for (double s : {0.2, 0.5, 0.9}) {
    for (double t : {0.3, 0.7, 1.0}) {
      const double direct =
          std::sqrt(s * t) * std::asin(std::min(s, t) / std::sqrt(s * t));
      CHECK(k->cov(s, t) == doctest::Approx(direct).epsilon(1e-13));
    }
  }
  CHECK(k->cov(1.0, 1.0) == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(k->zero_at_origin());
}

TEST_CASE("median spec passes its own shape audit") {
  const PhiSpecCheck audit = check_phi_spec(median_phi_spec());
  CHECK(audit.within_bounds);
  CHECK(audit.max_residual < 1e-3);
  CHECK(audit.max_phi1_fd_error < 5e-3);
  CHECK(audit.max_phi2_fd_error < 5e-3);
}

TEST_CASE("phi_cov handles the degenerate corners") {
  const PhiKernelSpec& spec = median_phi_spec();
  CHECK(phi_cov(spec, 0.0, 0.5) == 0.0);
  CHECK(phi_cov(spec, 0.5, 0.0) == 0.0);
  CHECK(phi_cov(spec, 0.0, 0.0) == 0.0);
  CHECK(phi_cov(spec, 0.4, 0.4) == doctest::Approx(0.4 * spec.phi(1.0)).epsilon(1e-14));
}

TEST_CASE("normal quantile process at the median") {
  auto spec = normal_quantile_spec();
  CHECK(spec.alpha == 0.5);
  QuantileProcessKernel k(spec);

  // Density at time 0 is the initial density itself.
  CHECK(k.density_u(0.3, 0.0) ==
        doctest::Approx(gaussian_density(0.3)).epsilon(1e-12));
  // Median of a symmetric density stays at zero; theta(t) = sqrt(2 pi (1 + t)).
  CHECK(k.quantile(0.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(k.quantile(1.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(k.theta(0.0) == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-9));
  CHECK(k.theta(1.0) == doctest::Approx(std::sqrt(4.0 * kPi)).epsilon(1e-9));
  CHECK_FALSE(k.zero_at_origin());

  // Marginal variance: sqrt((1+s)(1+t)) arcsin(sqrt((1+s)/(1+t))), s <= t.
  const double direct =
      std::sqrt(2.0 * 2.0) * std::asin(std::sqrt(2.0 / 2.0));
  CHECK(k.cov(1.0, 1.0) == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("uniform quantile process pins the closed-form pieces") {
  auto spec = uniform_quantile_spec(0.3, 1.0);
  QuantileProcessKernel k(spec);
  // q(0) solves F(q) = alpha for the uniform on [-1, 1]: q = 2 alpha - 1.
  CHECK(k.quantile(0.0) == doctest::Approx(-0.4).epsilon(1e-9));
  // theta(0) = 1 / density = 2 at time zero.
  CHECK(k.theta(0.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(k.cov(0.5, 0.5) > 0.0);
}

TEST_CASE("quantile covariance is symmetric and positive on the diagonal") {
  QuantileProcessKernel k(normal_quantile_spec(0.35));
  for (double s : {0.1, 0.6}) {
    for (double t : {0.4, 1.0}) {
      CHECK(k.cov(s, t) == doctest::Approx(k.cov(t, s)).epsilon(1e-10));
    }
  }
  CHECK(k.cov(0.2, 0.2) > 0.0);
}

TEST_CASE("make_kernel routes families and rejects junk") {
  CHECK(make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0})->family() ==
        KernelFamily::Bifractional);
  CHECK(make_kernel({.family = "brownian"})->name() == "brownian");
  CHECK(make_kernel({.family = "phi", .phi = "median"})->family() == KernelFamily::Phi);
  CHECK(make_kernel({.family = "quantile", .density = "normal"})->family() ==
        KernelFamily::Quantile);
  CHECK(make_kernel({.family = "quantile", .density = "uniform"})->family() ==
        KernelFamily::Quantile);

  CHECK_THROWS_AS((void)make_kernel({.family = "nope"}), UnsupportedKernel);
  CHECK_THROWS_AS((void)make_kernel({.family = "phi", .phi = "nope"}),
                  UnsupportedKernel);
  CHECK_THROWS_AS((void)make_kernel({.family = "quantile", .density = "nope"}),
                  UnsupportedKernel);
  CHECK_THROWS_AS((void)make_kernel({.family = "bifbm", .H = 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_kernel({.family = "bifbm", .K = 1.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_kernel({.family = "quantile", .alpha = 1.0}),
                  std::invalid_argument);
}

TEST_CASE("family names round-trip through the enum") {
  CHECK(family_name(KernelFamily::Bifractional) == "bifbm");
  CHECK(family_name(KernelFamily::Phi) == "phi");
  CHECK(family_name(KernelFamily::Quantile) == "quantile");
}
