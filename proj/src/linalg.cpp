#include "hqc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hqc {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix shape mismatch");
  Matrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (auto& x : c.data_) x *= s;
  return c;
}

double norm1(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) sum += std::abs(a(i, j));
    best = std::max(best, sum);
  }
  return best;
}

Matrix expm(const Matrix& a, double threshold) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
  if (!(threshold > 0.0)) throw std::invalid_argument("expm: threshold must be positive");
  const std::size_t n = a.rows();
  int squarings = 0;
  double norm = norm1(a);
  while (norm > threshold) {
    norm /= 2.0;
    ++squarings;
  }
  Matrix scaled = std::ldexp(1.0, -squarings) * a;
  Matrix sum = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  // With ‖A‖ ≤ 1/2 the remainder after 24 terms is below 1e-30.
  for (int k = 1; k <= 24; ++k) {
    term = (1.0 / k) * (term * scaled);
    sum = sum + term;
    if (norm1(term) <= 1e-18 * norm1(sum)) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

std::vector<std::vector<std::size_t>> connected_components(const Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && a(i, j) != 0.0) {
        auto ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = find(i);
    if (slot[r] == n) {
      slot[r] = groups.size();
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

bool is_positive_semidefinite(const Matrix& a, double tol) {
  const std::size_t n = a.rows();
  if (n != a.cols()) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol * (1.0 + std::abs(a(i, j)))) return false;
  // Symmetric pivoting on the largest remaining diagonal entry.
  Matrix m = a;
  std::vector<bool> done(n, false);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(m(i, i)));
  const double eps = tol * std::max(1.0, scale);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t p = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && (p == n || m(i, i) > m(p, p))) p = i;
    const double d = m(p, p);
    if (d < -eps) return false;
    done[p] = true;
    if (d <= eps) {
      // Remaining block must vanish in this row for PSD.
      for (std::size_t j = 0; j < n; ++j)
        if (!done[j] && std::abs(m(p, j)) > eps) return false;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const double l = m(i, p) / d;
      for (std::size_t j = 0; j < n; ++j)
        if (!done[j]) m(i, j) -= l * m(p, j);
    }
  }
  return true;
}

}  // namespace hqc
