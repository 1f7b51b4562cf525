#pragma once

#include "hqc/bidifferential.hpp"
#include "hqc/expr.hpp"

namespace hqc {

/// Constants (a, b, c) of the symmetric first-order bidifferential
///   σ = a ←∂_q→∂_q + b ←∂_p→∂_p + c (←∂_q→∂_p + ←∂_p→∂_q),
/// applied to every degree of freedom of one sector.
struct SigmaSpec {
  Coefficient a;
  Coefficient b;
  Coefficient c;

  static SigmaSpec weyl() { return {}; }
  bool is_zero() const { return a.is_zero() && b.is_zero() && c.is_zero(); }
  friend bool operator==(const SigmaSpec&, const SigmaSpec&) = default;
  friend bool operator<(const SigmaSpec& x, const SigmaSpec& y) {
    if (!(x.a == y.a)) return x.a < y.a;
    if (!(x.b == y.b)) return x.b < y.b;
    return x.c < y.c;
  }
};

/// σ as a bidifferential operator over the given sector pairs.
Bidifferential sigma_operator(const SigmaSpec& s, Sector sector,
                              const std::set<std::uint32_t>& dofs);

/// Quantization scheme of both sectors: σ_C enters the composition product ⊛,
/// σ_Q the star product exp((iħ/2)(P_Q + σ_Q)).
class ProductSpec {
 public:
  ProductSpec() = default;
  explicit ProductSpec(SigmaSpec sigma_c, SigmaSpec sigma_q = {})
      : sigma_c_(std::move(sigma_c)), sigma_q_(std::move(sigma_q)) {}

  /// Adds a zeroth-order term d·u·v to σ_C. Such a σ breaks 1σu = 0 and
  /// with it the reduction identities; only used to exercise those checks.
  static ProductSpec with_zeroth_order_sigma(SigmaSpec sigma_c, Coefficient d);

  const SigmaSpec& sigma_c() const { return sigma_c_; }
  const SigmaSpec& sigma_q() const { return sigma_q_; }
  const Coefficient& sigma_c_zeroth() const { return sigma_c_zeroth_; }
  bool is_first_order() const { return sigma_c_zeroth_.is_zero(); }

 private:
  SigmaSpec sigma_c_;
  SigmaSpec sigma_q_;
  Coefficient sigma_c_zeroth_;
};

enum class PoissonSectors { Q, C, both };

/// Σ (∂_q u ∂_p v − ∂_p u ∂_q v) over the selected sector pairs.
Expression poisson(const Expression& u, const Expression& v,
                   PoissonSectors sectors = PoissonSectors::C);

/// u σ v over the classical sector.
Expression sigma_product(const Expression& u, const Expression& v, const SigmaSpec& s);
Expression sigma_product(const Expression& u, const Expression& v, const ProductSpec& spec);

/// u G v = (u P_C v + u σ v) / 2.
Expression g_product(const Expression& u, const Expression& v, const SigmaSpec& s);
Expression g_product(const Expression& u, const Expression& v, const ProductSpec& spec);

/// u ⊛ v = u·v + iħ u G v (acts on classical variables only).
Expression ast_product(const Expression& u, const Expression& v, const SigmaSpec& s);
Expression ast_product(const Expression& u, const Expression& v, const ProductSpec& spec);

/// u ⋆ v = Σ_n (iħ/2)^n/n! (P_Q + σ_Q)^n (u, v); the series terminates on polynomials.
Expression star_q(const Expression& u, const Expression& v, const ProductSpec& spec = {});

/// u ⋆⊛ v = Σ (u_Q ⋆ v_Q)(u_C ⊛ v_C) over both sector decompositions.
Expression hybrid_product(const Expression& u, const Expression& v, const ProductSpec& spec = {});

/// [[u, v]] = (u ⋆ v − v ⋆ u)/(iħ).
Expression quantum_bracket(const Expression& u, const Expression& v, const ProductSpec& spec = {});

/// Four algebraically equivalent routes to the hybrid bracket:
///   F1  [[u,v]] + ⋆G − ⋆ᵗGᵗ
///   F2  [[u,v]] + ½(⋆+⋆ᵗ)P + ½(⋆−⋆ᵗ)σ
///   F3  (u ⋆⊛ v − v ⋆⊛ u)/(iħ)
///   F4  [[u, v_Q]] ⊛ v_C + v_Q ⋆ {u, v_C}, summed over the factors of v
enum class BracketForm { F1, F2, F3, F4 };

Expression hybrid_bracket(const Expression& u, const Expression& v, const ProductSpec& spec = {},
                          BracketForm form = BracketForm::F3);

/// F4 with v = v_q·v_c given as a single pure pair.
Expression hybrid_bracket_factored(const Expression& u, const Expression& v_q,
                                   const Expression& v_c, const ProductSpec& spec = {});

/// [[u,v]] + ½(⋆+⋆ᵗ)P: the bracket obtained from a Weyl-realized classical
/// sector. Ignores σ_C.
Expression weyl_hybrid_bracket(const Expression& u, const Expression& v,
                               const ProductSpec& spec = {});

}  // namespace hqc
