#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hqc/products.hpp"

namespace hqc {

/// Outcome of an exact identity check. `is_zero` mirrors `residual.is_zero()`;
/// `witness` holds the inputs that produced a nonzero residual.
struct ResidualReport {
  Expression residual;
  bool is_zero = true;
  std::vector<Expression> witness;

  static ResidualReport of(Expression residual, std::vector<Expression> inputs);
};

enum class ProductKind { composition, star, hybrid, pointwise, g };

/// (u∘v)∘w − u∘(v∘w) for the chosen product.
Expression associator(const Expression& u, const Expression& v, const Expression& w,
                      ProductKind product, const ProductSpec& spec = {});

/// Cyclic sum {[{[u,v]},w]} + {[{[v,w]},u]} + {[{[w,u]},v]}.
ResidualReport jacobi_residual(const Expression& u, const Expression& v, const Expression& w,
                               const ProductSpec& spec = {});

struct LeibnizReport {
  /// {[u, v⋆⊛w]} − {[u,v]}⋆⊛w − v⋆⊛{[u,w]}
  ResidualReport composition;
  /// {[u, v·w]} − {[u,v]}·w − v·{[u,w]}
  ResidualReport pointwise;
};

LeibnizReport leibniz_residual(const Expression& u, const Expression& v, const Expression& w,
                               const ProductSpec& spec = {});

struct ReductionReport {
  ResidualReport quantum_classical;  ///< {[u_Q, v_C]} = 0
  ResidualReport quantum_any;        ///< {[u_Q, v]} = v_C [[u_Q, v_Q]]
  ResidualReport classical_any;      ///< {[u_C, v]} = v_Q {u_C, v_C}
  bool all_hold() const {
    return quantum_classical.is_zero && quantum_any.is_zero && classical_any.is_zero;
  }
};

/// Checks the three reduction identities on random pure factors.
ReductionReport check_reduction(const ProductSpec& spec, std::uint64_t seed = 0, int trials = 16);

/// u(vGw) − (uv)Gw + uG(vw) − (uGv)w, which vanishes for first-order σ.
ResidualReport acond_residual(const Expression& u, const Expression& v, const Expression& w,
                              const ProductSpec& spec);

/// The eight-term σ condition; equals −4/ħ² times the ⊛-associator.
ResidualReport sigma_assoc_residual(const Expression& u, const Expression& v, const Expression& w,
                                    const SigmaSpec& s);

// ------------------------------------------------------------ no-go scan

struct NogoWitness {
  SigmaSpec sigma;
  Expression u, v, w;
  Expression associator;
};

class WitnessNotFound : public Error {
 public:
  explicit WitnessNotFound(SigmaSpec sigma);
  const SigmaSpec& sigma() const { return sigma_; }

 private:
  SigmaSpec sigma_;
};

/// (a, b, c) ∈ {−1, 0, 1}³ in lexicographic order.
std::vector<SigmaSpec> default_sigma_grid();

/// Searches random classical monomial triples of degree ≤ trial_degree for a
/// nonzero ⊛-associator, one independent seeded stream per grid point.
/// Results follow grid order. Throws WitnessNotFound for the first grid point
/// without a witness; InputError if trial_degree < 3.
std::vector<NogoWitness> nogo_scan(const std::vector<SigmaSpec>& grid, int trial_degree,
                                   int trials, std::uint64_t seed, unsigned threads = 0);

/// First witness among all classical monomial triples of degree ≤ max_degree,
/// enumerated in graded order.
std::optional<NogoWitness> exhaustive_witness(const SigmaSpec& s, int max_degree = 3);

/// Worker count: HQC_THREADS if set, otherwise hardware concurrency.
unsigned default_thread_count();

// ------------------------------------------------------- subalgebras

struct SubalgebraCert {
  enum class Verdict { certified, refuted };

  std::vector<Expression> generators;
  SigmaSpec sigma;
  int max_degree = 0;
  Verdict verdict = Verdict::certified;
  /// Products of at most max_degree generators (the unit included).
  std::vector<Expression> basis;
  std::vector<Expression> witness;
  Expression witness_associator;

  bool certified() const { return verdict == Verdict::certified; }
};

class ClosureEscape : public Error {
 public:
  ClosureEscape(Expression x, Expression y);
  const Expression& left() const { return x_; }
  const Expression& right() const { return y_; }

 private:
  Expression x_, y_;
};

/// Exhaustive degree-bounded check: every ordered triple drawn from the
/// products of at most `max_degree` generators must have zero ⊛-associator,
/// and ⊛ of members whose word lengths sum to ≤ max_degree must stay in the
/// span. Generators must be pure classical. Throws ClosureEscape when the
/// associators vanish but the span is not closed.
SubalgebraCert certify_subalgebra(const std::vector<Expression>& generators, const SigmaSpec& s,
                                  int max_degree);

/// True if target lies in the linear span of basis (per hbar power).
bool in_span(const std::vector<Expression>& basis, const Expression& target);

// ----------------------------------------------------- minimal subalgebra

struct MembershipReport {
  ResidualReport condition;   ///< κ σ κ
  ResidualReport functional;  ///< f₁(κ)⊛f₂(κ) − f₁(κ)f₂(κ) on random f₁, f₂
  bool member() const { return condition.is_zero && functional.is_zero; }
};

MembershipReport minimal_membership(const Expression& kappa, const SigmaSpec& s,
                                    std::uint64_t seed = 0, int trials = 8, int max_degree = 5);

/// x + y·√d with x, y, d Gaussian rationals; d is fixed per value.
struct QuadraticNumber {
  Coefficient rational;
  Coefficient surd;
  Coefficient radicand;

  bool is_rational() const { return surd.is_zero(); }
  bool is_zero() const { return rational.is_zero() && surd.is_zero(); }
  QuadraticNumber operator+(const QuadraticNumber& o) const;
  QuadraticNumber operator*(const QuadraticNumber& o) const;
};

/// κ = q_C + k·p_C with k possibly outside Q(i).
struct LinearKappa {
  QuadraticNumber p_coefficient;
  /// b k² + 2c k + a, evaluated exactly in Q(i)(√d).
  QuadraticNumber condition_residual;

  /// Available when k is a Gaussian rational.
  std::optional<Expression> expression() const;
};

class DegenerateScheme : public Error {
 public:
  using Error::Error;
};

/// Both linear solutions q_C + ((−c ± √(c²−ab))/b) p_C of κσκ = 0.
std::vector<LinearKappa> kappa_linear(const SigmaSpec& s);

std::string to_string(const QuadraticNumber& x);

}  // namespace hqc
