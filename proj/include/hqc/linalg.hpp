#pragma once

#include <cstddef>
#include <vector>

namespace hqc {

/// Small dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator*(double s, const Matrix& a);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Maximum absolute column sum.
double norm1(const Matrix& a);

/// e^A by scaling and squaring: A is halved until its 1-norm is at most
/// `threshold`, exponentiated by a Taylor series, then squared back.
Matrix expm(const Matrix& a, double threshold = 0.5);

/// Groups of indices coupled through nonzero entries (either direction),
/// each sorted, ordered by smallest member.
std::vector<std::vector<std::size_t>> connected_components(const Matrix& a);

/// True if the symmetric matrix is positive semidefinite up to `tol`
/// (pivoted LDLᵀ).
bool is_positive_semidefinite(const Matrix& a, double tol = 1e-12);

}  // namespace hqc
