#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ntk {

using Vec = std::vector<double>;

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& rows);
  std::vector<Vec> to_rows() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_sq(std::span<const double> a);

/// Frobenius norm of a - b; shapes must agree.
double frobenius_distance(const Matrix& a, const Matrix& b);
double frobenius(const Matrix& a);
/// Sum_{r,c} a(r,c) b(r,c).
double frobenius_inner(const Matrix& a, const Matrix& b);

/// a + s*b
Matrix axpy(const Matrix& a, double s, const Matrix& b);
Matrix add_diagonal(const Matrix& a, double c);
double max_asymmetry(const Matrix& a);

Vec mat_vec(const Matrix& a, std::span<const double> x);
/// x^T A y
double bilinear(std::span<const double> x, const Matrix& a,
                std::span<const double> y);

}  // namespace ntk
