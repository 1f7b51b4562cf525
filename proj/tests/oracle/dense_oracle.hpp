#pragma once
// Brute-force reference arithmetic for one quantum and one classical pair.
// Written against the textbook formulas with explicit multinomial sums; it
// shares no code with the library's bidifferential engine.

#include <array>
#include <map>

#include <gmpxx.h>

#include "hqc/expr.hpp"

namespace oracle {

// Exponents of (qQ, pQ, qC, pC, hbar).
using Index = std::array<int, 5>;
enum { QQ = 0, PQ = 1, QC = 2, PC = 3, HB = 4 };

struct Cx {
  mpq_class re = 0, im = 0;
  Cx() = default;
  Cx(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}
  bool zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  Cx operator+(const Cx& o) const { return {re + o.re, im + o.im}; }
  Cx operator-(const Cx& o) const { return {re - o.re, im - o.im}; }
  Cx operator*(const Cx& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
};

class Poly {
 public:
  std::map<Index, Cx> t;

  static Poly var(int which, int power = 1) {
    Poly p;
    Index k{};
    k[which] = power;
    p.t[k] = Cx(1);
    return p;
  }
  static Poly constant(Cx c) {
    Poly p;
    if (!c.zero()) p.t[Index{}] = c;
    return p;
  }

  void add(const Index& k, const Cx& c) {
    Cx s = t[k] + c;
    if (s.zero())
      t.erase(k);
    else
      t[k] = s;
  }
  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (auto& [k, c] : o.t) r.add(k, c);
    return r;
  }
  Poly operator-(const Poly& o) const {
    Poly r = *this;
    for (auto& [k, c] : o.t) r.add(k, Cx(0) - c);
    return r;
  }
  Poly operator*(const Poly& o) const {
    Poly r;
    for (auto& [a, ca] : t)
      for (auto& [b, cb] : o.t) {
        Index k;
        for (int j = 0; j < 5; ++j) k[j] = a[j] + b[j];
        r.add(k, ca * cb);
      }
    return r;
  }
  Poly scaled(const Cx& c) const {
    Poly r;
    for (auto& [k, v] : t) r.add(k, v * c);
    return r;
  }
  // n-th derivative in one variable.
  Poly d(int which, int n = 1) const {
    Poly r;
    for (auto& [k, c] : t) {
      if (k[which] < n) continue;
      mpq_class f = 1;
      for (int j = 0; j < n; ++j) f *= k[which] - j;
      Index m = k;
      m[which] -= n;
      r.add(m, c * Cx(f));
    }
    return r;
  }
  bool operator==(const Poly& o) const {
    if (t.size() != o.t.size()) return false;
    for (auto& [k, c] : t) {
      auto it = o.t.find(k);
      if (it == o.t.end() || it->second.re != c.re || it->second.im != c.im) return false;
    }
    return true;
  }

  hqc::Expression to_expression() const {
    hqc::Expression e;
    const hqc::VariableId ids[4] = {hqc::VariableId::qQ(), hqc::VariableId::pQ(),
                                    hqc::VariableId::qC(), hqc::VariableId::pC()};
    for (auto& [k, c] : t) {
      hqc::Monomial m;
      for (int j = 0; j < 4; ++j) m = m * hqc::Monomial(ids[j], k[j]);
      e.add_term(m, k[HB], hqc::Coefficient(c.re, c.im));
    }
    return e;
  }

  static Poly from_expression(const hqc::Expression& e) {
    Poly p;
    for (const auto& [key, c] : e.terms()) {
      Index k{};
      for (const auto& [v, n] : key.monomial.factors()) {
        if (v.index != 0) throw std::logic_error("oracle handles one pair per sector");
        const int slot = (v.sector == hqc::Sector::Q ? 0 : 2) + (v.kind == hqc::Kind::momentum);
        k[slot] = static_cast<int>(n);
      }
      k[HB] = static_cast<int>(key.hbar_power);
      p.add(k, Cx(c.re(), c.im()));
    }
    return p;
  }
};

inline Poly hbar(int n = 1) { return Poly::var(HB, n); }

inline mpq_class factorial(int n) {
  mpq_class f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline Cx cpow(const Cx& x, int n) {
  Cx r(1);
  for (int k = 0; k < n; ++k) r = r * x;
  return r;
}

struct Sigma {
  Cx a, b, c;
};

// Classical-sector ⊛: u v + (iħ/2)(u_q v_p − u_p v_q + a u_q v_q + b u_p v_p + c(u_q v_p + u_p v_q)).
inline Poly ast(const Poly& u, const Poly& v, const Sigma& s) {
  Poly uq = u.d(QC), up = u.d(PC), vq = v.d(QC), vp = v.d(PC);
  Poly first = uq * vp - up * vq + (uq * vq).scaled(s.a) + (up * vp).scaled(s.b) +
               (uq * vp + up * vq).scaled(s.c);
  return u * v + (first * hbar()).scaled(Cx(0, mpq_class(1, 2)));
}

// Quantum-sector star product exp((iħ/2)(P + σ_Q)) by the multinomial theorem:
// P + σ = (1+c)∂q⊗∂p + (c−1)∂p⊗∂q + a∂q⊗∂q + b∂p⊗∂p.
inline Poly star(const Poly& u, const Poly& v, const Sigma& s = {}) {
  int du = 0, dv = 0;
  for (auto& [k, c] : u.t) du = std::max(du, k[QQ] + k[PQ]);
  for (auto& [k, c] : v.t) dv = std::max(dv, k[QQ] + k[PQ]);
  const int order = std::min(du, dv);
  const Cx w1 = s.c + Cx(1), w2 = s.c - Cx(1), w3 = s.a, w4 = s.b;
  Poly out;
  for (int n = 0; n <= order; ++n) {
    Poly term;
    for (int n1 = 0; n1 <= n; ++n1)
      for (int n2 = 0; n1 + n2 <= n; ++n2)
        for (int n3 = 0; n1 + n2 + n3 <= n; ++n3) {
          const int n4 = n - n1 - n2 - n3;
          const mpq_class multinomial =
              factorial(n) / (factorial(n1) * factorial(n2) * factorial(n3) * factorial(n4));
          const Cx weight = Cx(multinomial) * cpow(w1, n1) * cpow(w2, n2) * cpow(w3, n3) *
                            cpow(w4, n4);
          if (weight.zero()) continue;
          Poly left = u.d(QQ, n1 + n3).d(PQ, n2 + n4);
          Poly right = v.d(PQ, n1 + n4).d(QQ, n2 + n3);
          term = term + (left * right).scaled(weight);
        }
    const Cx pref = cpow(Cx(0, mpq_class(1, 2)), n) * Cx(1 / factorial(n));
    out = out + (term * hbar(n)).scaled(pref);
  }
  return out;
}

// Splits into (quantum part, classical monomial) pairs; hbar rides with the quantum factor.
inline std::map<Index, Poly> by_classical(const Poly& u) {
  std::map<Index, Poly> out;
  for (auto& [k, c] : u.t) {
    Index cl{0, 0, k[QC], k[PC], 0};
    Index qu{k[QQ], k[PQ], 0, 0, k[HB]};
    out[cl].add(qu, c);
  }
  return out;
}

inline Poly hybrid_product(const Poly& u, const Poly& v, const Sigma& s) {
  Poly out;
  for (auto& [ck, uq] : by_classical(u))
    for (auto& [dk, vq] : by_classical(v)) {
      Poly uc, vc;
      uc.t[ck] = Cx(1);
      vc.t[dk] = Cx(1);
      out = out + star(uq, vq) * ast(uc, vc, s);
    }
  return out;
}

// (x)/(iħ): lowers hbar by one and multiplies by −i.
inline Poly over_i_hbar(const Poly& x) {
  Poly r;
  for (auto& [k, c] : x.t) {
    if (k[HB] == 0) throw std::logic_error("oracle: term without hbar");
    Index m = k;
    m[HB] -= 1;
    r.add(m, c * Cx(0, -1));
  }
  return r;
}

inline Poly hybrid_bracket(const Poly& u, const Poly& v, const Sigma& s) {
  return over_i_hbar(hybrid_product(u, v, s) - hybrid_product(v, u, s));
}

inline Poly ast_associator(const Poly& u, const Poly& v, const Poly& w, const Sigma& s) {
  return ast(ast(u, v, s), w, s) - ast(u, ast(v, w, s), s);
}

}  // namespace oracle
