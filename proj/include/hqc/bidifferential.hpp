#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <utility>

#include "hqc/expr.hpp"

namespace hqc {

/// Constant-coefficient bidifferential operator
///   (u, v) ↦ Σ c · (∂^α u) · (∂^β v),
/// stored as a polynomial in left- and right-acting derivative symbols.
class Bidifferential {
 public:
  using Key = std::pair<Monomial, Monomial>;

  Bidifferential() = default;

  /// The pointwise product 1 ⊗ 1.
  static Bidifferential pointwise();

  void add(const Monomial& left, const Monomial& right, const Coefficient& c);

  const std::map<Key, Coefficient>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Operator whose symbol is the product of both symbols (derivatives commute).
  Bidifferential compose(const Bidifferential& other) const;
  Bidifferential power(std::uint32_t n) const;

  /// (u, v) ↦ op(v, u).
  Bidifferential transpose() const;
  bool is_symmetric() const { return transpose() == *this; }

  Expression apply(const Expression& u, const Expression& v) const;

  Bidifferential& operator+=(const Bidifferential& o);
  friend Bidifferential operator+(Bidifferential a, const Bidifferential& b) { return a += b; }
  friend Bidifferential operator*(const Coefficient& c, Bidifferential op);
  friend bool operator==(const Bidifferential&, const Bidifferential&) = default;

 private:
  std::map<Key, Coefficient> terms_;
};

/// Degree-of-freedom indices of one sector that occur in any argument.
std::set<std::uint32_t> dof_indices(Sector s, const Expression& u, const Expression& v);

/// Σ_k (←∂_{q_k} →∂_{p_k} − ←∂_{p_k} →∂_{q_k}) over the given sector pairs.
Bidifferential poisson_operator(Sector s, const std::set<std::uint32_t>& dofs);

}  // namespace hqc
