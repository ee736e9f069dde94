#include "distil/nn/matrix.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "distil/errors.hpp"

namespace distil::nn {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap view(const Matrix& m) { return ConstMap(m.data(), m.rows(), m.cols()); }
MutMap view(Matrix& m) { return MutMap(m.data(), m.rows(), m.cols()); }

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::column(std::initializer_list<double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values));
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("Matrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

std::vector<double> Matrix::column_values(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  if (values.size() != rows_ || c >= cols_) {
    throw DimensionError("Matrix::set_column: bad column or length");
  }
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

std::string Matrix::shape_string() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Matrix::squared_norm() const {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return acc;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double scalar) {
  for (double& v : data_) v *= scalar;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double scalar) { return a *= scalar; }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + a.shape_string() + " * " + b.shape_string());
  }
  Matrix out(a.rows(), b.cols());
  if (out.empty() || a.cols() == 0) return out;
  view(out).noalias() = view(a) * view(b);
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul_tn: " + a.shape_string() + "^T * " + b.shape_string());
  }
  Matrix out(a.cols(), b.cols());
  if (out.empty() || a.rows() == 0) return out;
  view(out).noalias() = view(a).transpose() * view(b);
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: " + a.shape_string() + " * " + b.shape_string() + "^T");
  }
  Matrix out(a.rows(), b.rows());
  if (out.empty() || a.cols() == 0) return out;
  view(out).noalias() = view(a) * view(b).transpose();
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out = a;
  auto o = out.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= bv[i];
  return out;
}

void add_column_broadcast(Matrix& m, const Matrix& bias) {
  if (bias.rows() != m.rows() || bias.cols() != 1) {
    throw DimensionError("add_column_broadcast: bias " + bias.shape_string() + " for " +
                         m.shape_string());
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double b = bias(r, 0);
    double* row = m.data() + r * m.cols();
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] += b;
  }
}

Matrix row_sums(const Matrix& m) {
  Matrix out(m.rows(), 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.data() + r * m.cols();
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc += row[c];
    out(r, 0) = acc;
  }
  return out;
}

Matrix vstack(std::span<const Matrix> blocks) {
  if (blocks.empty()) return {};
  const std::size_t cols = blocks.front().cols();
  std::size_t rows = 0;
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw DimensionError("vstack: column count mismatch");
    rows += b.rows();
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const auto& b : blocks) data.insert(data.end(), b.values().begin(), b.values().end());
  return Matrix(rows, cols, std::move(data));
}

Matrix row_block(const Matrix& m, std::size_t first, std::size_t count) {
  if (first + count > m.rows()) throw DimensionError("row_block: out of range");
  const auto begin = m.values().begin() + static_cast<std::ptrdiff_t>(first * m.cols());
  return Matrix(count, m.cols(),
                std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * m.cols())));
}

Matrix gather_columns(const Matrix& m, std::span<const std::size_t> columns) {
  Matrix out(m.rows(), columns.size());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (columns[k] >= m.cols()) throw DimensionError("gather_columns: index out of range");
      out(r, k) = m(r, columns[k]);
    }
  return out;
}

}  // namespace distil::nn
