#include "hqc/coefficient.hpp"

#include <sstream>

namespace hqc {

Coefficient::Coefficient(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

Coefficient Coefficient::from_double(double re, double im) {
  // mpq_class(double) is exact.
  return Coefficient(mpq_class(re), mpq_class(im));
}

Coefficient& Coefficient::operator+=(const Coefficient& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

Coefficient& Coefficient::operator-=(const Coefficient& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

Coefficient& Coefficient::operator*=(const Coefficient& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

Coefficient& Coefficient::operator/=(const Coefficient& o) {
  if (o.is_zero()) throw std::domain_error("division by zero coefficient");
  if (sgn(o.im_) == 0) {
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  mpq_class norm = o.re_ * o.re_ + o.im_ * o.im_;
  *this *= o.conj();
  re_ /= norm;
  im_ /= norm;
  return *this;
}

bool rational_sqrt(const mpq_class& x, mpq_class& root) {
  if (sgn(x) < 0) return false;
  if (!mpz_perfect_square_p(x.get_num_mpz_t()) || !mpz_perfect_square_p(x.get_den_mpz_t()))
    return false;
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), x.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), x.get_den_mpz_t());
  root = mpq_class(n, d);
  root.canonicalize();
  return true;
}

bool gaussian_sqrt(const Coefficient& z, Coefficient& root) {
  const mpq_class& x = z.re();
  const mpq_class& y = z.im();
  if (sgn(y) == 0) {
    mpq_class r;
    if (sgn(x) >= 0) {
      if (!rational_sqrt(x, r)) return false;
      root = Coefficient(r, 0);
    } else {
      if (!rational_sqrt(-x, r)) return false;
      root = Coefficient(0, r);
    }
    return true;
  }
  // sqrt(x+iy) = u + iv with u = sqrt((|z|+x)/2), v = y/(2u).
  mpq_class modulus;
  if (!rational_sqrt(x * x + y * y, modulus)) return false;
  mpq_class u;
  if (!rational_sqrt((modulus + x) / 2, u)) return false;
  mpq_class v = y / (2 * u);
  root = Coefficient(u, v);
  return true;
}

namespace {

std::string rational_text(const mpq_class& q) { return q.get_str(); }

}  // namespace

std::string to_string(const Coefficient& c) {
  if (c.is_real()) return rational_text(c.re());
  if (sgn(c.re()) == 0) {
    const mpq_class& im = c.im();
    if (im == 1) return "i";
    if (im == -1) return "-i";
    return rational_text(im) + "*i";
  }
  std::ostringstream os;
  os << '(' << rational_text(c.re());
  const mpq_class& im = c.im();
  if (sgn(im) > 0) os << '+';
  if (im == 1) {
    os << 'i';
  } else if (im == -1) {
    os << "-i";
  } else {
    os << rational_text(im) << "*i";
  }
  os << ')';
  return os.str();
}

}  // namespace hqc
