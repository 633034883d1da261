#pragma once

namespace stratosim {

/// Uniform lattice on [0, horizon] with mesh 1/n: times j/n for j = 0..size().
/// Midpoint sums pair the mesh steps two at a time, so the usable block count
/// for a time t is floor(n t / 2).
class Partition {
 public:
  Partition(long n, double horizon);

  long n() const { return n_; }
  double horizon() const { return horizon_; }
  /// Index of the last lattice point, floor(n * horizon); at least 2.
  long size() const { return m_; }
  double time(long i) const { return static_cast<double>(i) / static_cast<double>(n_); }

  /// Complete two-step blocks available up to time t; 2 * blocks(t) <= size().
  long blocks(double t) const;

  /// Lattice index of a time expected to sit on the grid; GridMismatch otherwise.
  long index_of(double t) const;

 private:
  long n_ = 0;
  double horizon_ = 0.0;
  long m_ = 0;
};

}  // namespace stratosim
