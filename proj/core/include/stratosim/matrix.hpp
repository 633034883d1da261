#pragma once

#include <cstddef>
#include <vector>

namespace stratosim {

/// Dense row-major matrix, just enough for covariance work.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  double* row(std::size_t i) { return data_.data() + i * cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Packed symmetric matrix (lower triangle, i >= j).
class SymmetricPacked {
 public:
  SymmetricPacked() = default;
  explicit SymmetricPacked(std::size_t n) : n_(n), data_(n * (n + 1) / 2, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
  double at(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }

  std::size_t size() const { return n_; }
  std::size_t stored() const { return data_.size(); }

  static std::size_t packed_index(std::size_t i, std::size_t j) {
    return i * (i + 1) / 2 + j;  // requires i >= j
  }
  double& flat(std::size_t k) { return data_[k]; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    return i >= j ? packed_index(i, j) : packed_index(j, i);
  }
  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace stratosim
