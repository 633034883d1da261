#pragma once

#include <functional>
#include <string>

#include "stratosim/kernels.hpp"

namespace stratosim {

/// A series value with a certified truncation bound: the dropped tail is at
/// most `tail_bound` (every term is dominated by (2m-1)^{-3}).
struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
  long terms = 0;
};

/// Sum over m >= 1 of (sqrt(2m+1) - 2 sqrt(2m) + sqrt(2m-1))^2.
SeriesValue series_a(double tol = 1e-12);
/// Sum over m >= 1 of (sqrt(2m+2) - 2 sqrt(2m+1) + sqrt(2m))^2.
SeriesValue series_b1(double tol = 1e-12);
/// Sum over m >= 1 of (sqrt(2m) - 2 sqrt(2m-1) + sqrt(2m-2))^2 (first term (sqrt2 - 2)^2).
SeriesValue series_b2(double tol = 1e-12);

/// The series combination 2 + 4a - 2b1 - 2b2 (~1.3437), reported by the CLI.
/// Note the quantile eta model does not use it: the lattice pairing sums for
/// that family converge to 2 + a - b2 per unit theta^2 weight instead.
double quantile_coefficient(double tol = 1e-12);

/// Same-parity pairing constant for the bifractional family: 4^{-K} (2 + a).
/// The 2 is the diagonal term (squared increment variances); a collects the
/// even-gap correlations.
double c_k_plus(double K, double tol = 1e-12);
/// Cross-parity pairing constant: 4^{-K} b2. Cross-parity pairs sit at odd
/// gaps, so there is no diagonal term and b2 collects the whole sum.
double c_k_minus(double K, double tol = 1e-12);

/// Pairing constants for the phi family: 4 kappa^2 (2 + a) (plus) and
/// 4 kappa^2 b2 (minus), the same gap sums weighted by the local increment
/// scale; plus >= minus always, both quadratic in kappa.
double c_beta_plus(double kappa, double tol = 1e-12);
double c_beta_minus(double kappa, double tol = 1e-12);

/// Variance clock of the independent correction term in the limit law:
/// eta(0) = 0, nondecreasing.
struct EtaModel {
  std::string description;
  std::function<double(double)> eta;
};

EtaModel zero_eta_model();

/// Limit model per family: bifractional with mesh scaling HK = 1/4 ->
/// 2 (c_k_plus - c_k_minus) t; phi family -> (c_beta_plus - c_beta_minus) t^2;
/// quantile family -> ((2 + a - b2) / pi) integral of theta(s)^2 ds.
/// Throws UnsupportedKernel when the kernel admits no model; that includes
/// the plain Brownian kernel, whose degenerate limit is zero_eta_model().
EtaModel eta_model_for(const CovarianceKernel& kernel, double tol = 1e-12);

/// Evaluates model.eta(t); integral-form models run adaptive quadrature.
double eta_eval(const EtaModel& model, double t);

}  // namespace stratosim
