#include "stratosim/constants.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "stratosim/analytic.hpp"
#include "stratosim/errors.hpp"

namespace stratosim {

namespace {

/// Terms needed so that the certified tail integral (1/4)(2M-1)^{-2} <= tol.
long terms_for(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("series: tolerance must be positive");
  const double bound = 0.5 / std::sqrt(tol);  // 2M - 1 >= 1/(2 sqrt(tol))
  long m = static_cast<long>(std::ceil((bound + 1.0) / 2.0));
  return m < 1 ? 1 : m;
}

template <typename Term>
SeriesValue sum_series(double tol, Term term) {
  const long terms = terms_for(tol);
  double sum = 0.0, comp = 0.0;
  for (long m = 1; m <= terms; ++m) {
    const double y = term(m) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double tail = 0.25 / ((2.0 * terms - 1.0) * (2.0 * terms - 1.0));
  return {sum, tail, terms};
}

double sq(double x) { return x * x; }

}  // namespace

SeriesValue series_a(double tol) {
  return sum_series(tol, [](long m) {
    return sq(std::sqrt(2.0 * m + 1.0) - 2.0 * std::sqrt(2.0 * m) + std::sqrt(2.0 * m - 1.0));
  });
}

SeriesValue series_b1(double tol) {
  return sum_series(tol, [](long m) {
    return sq(std::sqrt(2.0 * m + 2.0) - 2.0 * std::sqrt(2.0 * m + 1.0) + std::sqrt(2.0 * m));
  });
}

SeriesValue series_b2(double tol) {
  return sum_series(tol, [](long m) {
    return sq(std::sqrt(2.0 * m) - 2.0 * std::sqrt(2.0 * m - 1.0) + std::sqrt(2.0 * m - 2.0));
  });
}

double quantile_coefficient(double tol) {
  const double each = tol / 8.0;  // weights 4 + 2 + 2 on the three tails
  return 2.0 + 4.0 * series_a(each).value - 2.0 * series_b1(each).value -
         2.0 * series_b2(each).value;
}

double c_k_plus(double K, double tol) {
  if (!(K > 0.0 && K <= 1.0)) throw std::invalid_argument("c_k_plus: K must lie in (0,1]");
  return std::exp2(-2.0 * K) * (2.0 + series_a(tol).value);
}

double c_k_minus(double K, double tol) {
  if (!(K > 0.0 && K <= 1.0)) throw std::invalid_argument("c_k_minus: K must lie in (0,1]");
  return std::exp2(-2.0 * K) * series_b2(tol).value;
}

double c_beta_plus(double kappa, double tol) {
  const double k2 = kappa * kappa;
  return 8.0 * k2 + 4.0 * k2 * series_a(tol).value;
}

double c_beta_minus(double kappa, double tol) {
  const double k2 = kappa * kappa;
  return 4.0 * k2 * series_b2(tol).value;
}

EtaModel zero_eta_model() {
  return {"zero", [](double) { return 0.0; }};
}

EtaModel eta_model_for(const CovarianceKernel& kernel, double tol) {
  if (const auto* b = dynamic_cast<const BifractionalKernel*>(&kernel)) {
    // The Brownian case (H=1/2, K=1) lands here too: callers that want its
    // degenerate limit use zero_eta_model() explicitly.
    if (!b->clt_valid())
      throw UnsupportedKernel("eta_model_for: bifbm parameters outside the limit regime (" +
                              kernel.name() + ")");
    const double c = 2.0 * (c_k_plus(b->params().K, tol) - c_k_minus(b->params().K, tol));
    return {"linear(" + kernel.name() + ")", [c](double t) { return c * t; }};
  }
  if (const auto* p = dynamic_cast<const PhiProcessKernel*>(&kernel)) {
    const double kappa = p->spec().kappa;
    const double c = c_beta_plus(kappa, tol) - c_beta_minus(kappa, tol);
    return {"quadratic(" + kernel.name() + ")", [c](double t) { return c * t * t; }};
  }
  if (const auto* q = dynamic_cast<const QuantileProcessKernel*>(&kernel)) {
    // Same even/odd gap combination as the phi pairing difference, at unit
    // local scale: theta carries the whole spec dependence.
    const double coef =
        (2.0 + series_a(tol).value - series_b2(tol).value) / kPi;
    // Own a private copy: the model may outlive the kernel handed in.
    auto own = std::make_shared<QuantileProcessKernel>(q->spec());
    auto fn = [coef, own](double t) {
      if (t == 0.0) return 0.0;
      QuadratureOptions opt;
      opt.abs_tol = 1e-10;
      const double integral = integrate(
          [&](double s) {
            const double th = own->theta(s);
            return th * th;
          },
          0.0, t, opt);
      return coef * integral;
    };
    return {"integral(" + kernel.name() + ")", fn};
  }
  throw UnsupportedKernel("eta_model_for: no model for kernel " + kernel.name());
}

double eta_eval(const EtaModel& model, double t) { return model.eta(t); }

}  // namespace stratosim
