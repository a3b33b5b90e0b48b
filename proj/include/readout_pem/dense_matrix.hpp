#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace readout_pem {

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }

  DenseMatrix operator*(const DenseMatrix& rhs) const;
  /// this^T * v
  std::vector<double> transpose_times(std::span<const double> v) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// max_i sum_j |a_ij|
double infinity_norm(const DenseMatrix& a);

/// LU factorization with partial (row) pivoting, PA = LU, stored compactly.
class LuFactorization {
 public:
  static constexpr double kPivotTolerance = 1e-12;

  /// Throws SingularMatrixError when a pivot magnitude drops below
  /// kPivotTolerance.
  explicit LuFactorization(DenseMatrix a);

  std::size_t size() const noexcept { return lu_.rows(); }
  std::vector<double> solve(std::span<const double> b) const;
  DenseMatrix inverse() const;

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace readout_pem
