#pragma once

#include <stdexcept>
#include <string>

namespace stratosim {

/// Base for failures raised while evaluating a covariance kernel.
struct KernelEvaluationFailure : std::runtime_error {
  explicit KernelEvaluationFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive quadrature exhausted its subdivision budget before reaching tolerance.
struct QuadratureFailure : KernelEvaluationFailure {
  explicit QuadratureFailure(const std::string& what) : KernelEvaluationFailure(what) {}
};

/// Root finder could not enclose a sign change.
struct RootNotBracketed : KernelEvaluationFailure {
  explicit RootNotBracketed(const std::string& what) : KernelEvaluationFailure(what) {}
};

struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

struct NonMonotoneEta : std::runtime_error {
  explicit NonMonotoneEta(const std::string& what) : std::runtime_error(what) {}
};

struct GridMismatch : std::runtime_error {
  explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct EmptySample : std::runtime_error {
  explicit EmptySample(const std::string& what) : std::runtime_error(what) {}
};

struct SampleTooSmall : std::runtime_error {
  explicit SampleTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct NonPositiveVariance : std::runtime_error {
  explicit NonPositiveVariance(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedKernel : std::runtime_error {
  explicit UnsupportedKernel(const std::string& what) : std::runtime_error(what) {}
};

struct CsvParseError : std::runtime_error {
  explicit CsvParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stratosim
