#include "ntklab/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace ntk {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<Vec> Matrix::to_rows() const {
  std::vector<Vec> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto rr = row(r);
    out[r].assign(rr.begin(), rr.end());
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(std::span<const double> a) { return dot(a, a); }
double norm2(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

namespace {
void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix shape mismatch");
}
}  // namespace

double frobenius_distance(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    const double d = a.data()[k] - b.data()[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double frobenius(const Matrix& a) { return norm2(a.data()); }

double frobenius_inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  return dot(a.data(), b.data());
}

Matrix axpy(const Matrix& a, double s, const Matrix& b) {
  require_same_shape(a, b);
  Matrix out = a;
  for (std::size_t k = 0; k < out.data().size(); ++k) out.data()[k] += s * b.data()[k];
  return out;
}

Matrix add_diagonal(const Matrix& a, double c) {
  if (a.rows() != a.cols()) throw std::invalid_argument("add_diagonal: not square");
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) out(i, i) += c;
  return out;
}

double max_asymmetry(const Matrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst;
}

Vec mat_vec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("mat_vec: size mismatch");
  Vec y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) y[r] = dot(a.row(r), x);
  return y;
}

double bilinear(std::span<const double> x, const Matrix& a,
                std::span<const double> y) {
  return dot(x, mat_vec(a, y));
}

}  // namespace ntk
