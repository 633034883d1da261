#include "stratosim/partition.hpp"

#include <cmath>
#include <stdexcept>

#include "stratosim/errors.hpp"

namespace stratosim {

Partition::Partition(long n, double horizon) : n_(n), horizon_(horizon) {
  if (n < 1) throw std::invalid_argument("Partition: n must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("Partition: horizon must be positive and finite");
  m_ = static_cast<long>(std::floor(static_cast<double>(n) * horizon + 1e-9));
  if (m_ < 2) throw std::invalid_argument("Partition: fewer than two mesh steps");
}

long Partition::blocks(double t) const {
  if (t < 0.0) throw std::invalid_argument("Partition::blocks: negative time");
  if (t > horizon_ + 1e-9 / static_cast<double>(n_))
    throw std::invalid_argument("Partition::blocks: time beyond the horizon");
  return static_cast<long>(std::floor(static_cast<double>(n_) * t / 2.0 + 1e-9));
}

long Partition::index_of(double t) const {
  const double scaled = t * static_cast<double>(n_);
  const long i = std::lround(scaled);
  if (i < 0 || i > m_ || std::fabs(scaled - static_cast<double>(i)) > 1e-6)
    throw GridMismatch("Partition::index_of: time is not a lattice point");
  return i;
}

}  // namespace stratosim
