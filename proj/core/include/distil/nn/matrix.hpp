#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace distil::nn {

/// Dense row-major matrix of doubles.
///
/// Networks in this library keep samples in columns: an activation batch
/// has shape (features, batch), and a weight matrix has shape (out, in).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix column(std::span<const double> values);
  static Matrix column(std::initializer_list<double> values);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::vector<double> column_values(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_string() const;

  void fill(double value);
  bool all_finite() const;
  double sum() const;
  double squared_norm() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scalar);

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double scalar);

/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// transpose(a) * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * transpose(b)
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);
Matrix hadamard(const Matrix& a, const Matrix& b);

/// Adds column vector `bias` (rows x 1) to every column of `m`.
void add_column_broadcast(Matrix& m, const Matrix& bias);
/// Sums the columns of `m` into a (rows x 1) vector.
Matrix row_sums(const Matrix& m);

/// Stacks matrices with equal column counts on top of each other.
Matrix vstack(std::span<const Matrix> blocks);
/// Copies rows [first, first + count) of `m`.
Matrix row_block(const Matrix& m, std::size_t first, std::size_t count);
/// Copies the listed columns of `m` in order.
Matrix gather_columns(const Matrix& m, std::span<const std::size_t> columns);

void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

}  // namespace distil::nn
