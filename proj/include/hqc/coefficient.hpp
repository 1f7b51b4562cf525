#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace hqc {

/// Exact complex rational number re + i·im.
class Coefficient {
 public:
  Coefficient() = default;
  Coefficient(long value) : re_(value) {}  // NOLINT(implicit)
  Coefficient(mpq_class re, mpq_class im = 0);

  /// Exact value of a binary double (every finite double is a dyadic rational).
  static Coefficient from_double(double re, double im = 0.0);
  static Coefficient i() { return Coefficient(0, 1); }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  Coefficient conj() const { return {re_, -im_}; }
  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  Coefficient& operator+=(const Coefficient& o);
  Coefficient& operator-=(const Coefficient& o);
  Coefficient& operator*=(const Coefficient& o);
  Coefficient& operator/=(const Coefficient& o);

  friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
  friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }
  friend Coefficient operator*(Coefficient a, const Coefficient& b) { return a *= b; }
  friend Coefficient operator/(Coefficient a, const Coefficient& b) { return a /= b; }
  Coefficient operator-() const { return {-re_, -im_}; }

  friend bool operator==(const Coefficient& a, const Coefficient& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// Total order (re, then im); only used to make containers deterministic.
  friend bool operator<(const Coefficient& a, const Coefficient& b) {
    int c = cmp(a.re_, b.re_);
    return c != 0 ? c < 0 : cmp(a.im_, b.im_) < 0;
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

/// Square root of a nonnegative rational when it is itself rational.
bool rational_sqrt(const mpq_class& x, mpq_class& root);

/// Principal square root of a Gaussian rational if it lies in Q(i).
bool gaussian_sqrt(const Coefficient& z, Coefficient& root);

/// Text form used by the expression printer: `3`, `-5/2`, `i`, `-1/2*i`, `(1+2*i)`.
std::string to_string(const Coefficient& c);

}  // namespace hqc
