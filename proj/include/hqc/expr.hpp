#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "hqc/coefficient.hpp"
#include "hqc/errors.hpp"

namespace hqc {

enum class Sector : std::uint8_t { Q, C };
enum class Kind : std::uint8_t { position, momentum };

/// A canonical phase-space coordinate. Ordered by (sector, kind, index).
struct VariableId {
  Sector sector = Sector::C;
  Kind kind = Kind::position;
  std::uint32_t index = 0;

  static constexpr VariableId qQ(std::uint32_t i = 0) { return {Sector::Q, Kind::position, i}; }
  static constexpr VariableId pQ(std::uint32_t i = 0) { return {Sector::Q, Kind::momentum, i}; }
  static constexpr VariableId qC(std::uint32_t i = 0) { return {Sector::C, Kind::position, i}; }
  static constexpr VariableId pC(std::uint32_t i = 0) { return {Sector::C, Kind::momentum, i}; }

  constexpr VariableId conjugate() const {
    return {sector, kind == Kind::position ? Kind::momentum : Kind::position, index};
  }

  friend constexpr auto operator<=>(const VariableId&, const VariableId&) = default;
};

/// Product of variable powers, stored sparse and sorted by VariableId.
class Monomial {
 public:
  using Factor = std::pair<VariableId, std::uint32_t>;

  Monomial() = default;
  explicit Monomial(VariableId v, std::uint32_t power = 1);
  /// Takes factors already sorted by variable with nonzero exponents.
  static Monomial from_sorted(std::vector<Factor> factors);

  std::span<const Factor> factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  std::uint32_t degree() const;
  std::uint32_t degree(Sector s) const;
  std::uint32_t exponent(VariableId v) const;

  /// Part of the monomial living in one sector.
  Monomial restricted(Sector s) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;

  /// Graded order: higher total degree first, then lexicographic by VariableId
  /// with higher exponents first.
  friend bool operator<(const Monomial& a, const Monomial& b);

 private:
  std::vector<Factor> factors_;
};

/// Key of one stored term: monomial times hbar^hbar_power.
struct TermKey {
  Monomial monomial;
  std::uint32_t hbar_power = 0;

  friend bool operator==(const TermKey&, const TermKey&) = default;
  friend bool operator<(const TermKey& a, const TermKey& b) {
    if (a.monomial == b.monomial) return a.hbar_power < b.hbar_power;
    return a.monomial < b.monomial;
  }
};

/// Exact polynomial in the canonical variables and a formal hbar, with
/// Gaussian-rational coefficients. Zero coefficients are never stored, so
/// structural equality is mathematical equality.
class Expression {
 public:
  using TermMap = std::map<TermKey, Coefficient>;

  Expression() = default;
  Expression(Coefficient c);  // NOLINT(implicit)
  Expression(long c) : Expression(Coefficient(c)) {}  // NOLINT(implicit)
  Expression(VariableId v);  // NOLINT(implicit)

  static Expression hbar(std::uint32_t power = 1);
  static Expression term(Coefficient c, Monomial m, std::uint32_t hbar_power = 0);

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::size_t size() const { return terms_.size(); }

  /// Polynomial degree in the canonical variables (hbar excluded). -1 for zero.
  int degree() const;
  int degree(Sector s) const;
  bool involves(Sector s) const { return degree(s) > 0; }
  std::uint32_t max_hbar_power() const;
  std::set<VariableId> variables() const;

  /// Coefficient of one stored term, zero if absent.
  Coefficient coefficient(const Monomial& m, std::uint32_t hbar_power = 0) const;

  /// Sum of terms with the given hbar power, returned with hbar_power 0.
  Expression hbar_component(std::uint32_t power) const;

  Expression& operator+=(const Expression& o);
  Expression& operator-=(const Expression& o);
  Expression& operator*=(const Expression& o);
  Expression& operator*=(const Coefficient& c);

  friend Expression operator+(Expression a, const Expression& b) { return a += b; }
  friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator*(Expression a, const Coefficient& c) { return a *= c; }
  friend Expression operator*(const Coefficient& c, Expression a) { return a *= c; }
  Expression operator-() const;

  friend bool operator==(const Expression&, const Expression&) = default;

  /// Multiplies by hbar^k.
  Expression times_hbar(std::uint32_t k = 1) const;

  /// Adds c·m·hbar^h, dropping the term if it cancels.
  void add_term(const Monomial& m, std::uint32_t h, const Coefficient& c);

 private:
  TermMap terms_;
};

Expression pow(const Expression& base, std::uint32_t exponent);

/// Formal partial derivative with respect to v.
Expression partial(const Expression& e, VariableId v);

/// Mixed partial derivative: differentiates by every factor of the multi-index.
Expression partial(const Expression& e, const Monomial& multi_index);

/// Returns e/(i·hbar). Throws NonQuantizedResidual if any term lacks hbar.
Expression hbar_div(const Expression& e);

/// Returns i·hbar·e.
Expression times_i_hbar(const Expression& e);

enum class SubstitutionMode { require_total, identity_for_unmapped };

/// Simultaneous substitution of variables by expressions.
Expression substitute(const Expression& e, const std::map<VariableId, Expression>& map,
                      SubstitutionMode mode = SubstitutionMode::identity_for_unmapped);

/// Numeric value with hbar bound to a positive number.
std::complex<double> evaluate(const Expression& e,
                              const std::map<VariableId, std::complex<double>>& point,
                              double hbar);

/// One term u_Q·u_C of a sector decomposition. hbar and coefficients ride
/// with the quantum factor; the classical factor is a bare monomial.
struct SectorPair {
  Expression quantum;
  Expression classical;
};

/// Splits e = Σ u_Q·u_C grouping by classical monomial (deterministic order).
std::vector<SectorPair> sector_decompose(const Expression& e);

}  // namespace hqc
