#include "hqc/expr.hpp"

#include <algorithm>
#include <cmath>

namespace hqc {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(VariableId v, std::uint32_t power) {
  if (power > 0) factors_.emplace_back(v, power);
}

Monomial Monomial::from_sorted(std::vector<Factor> factors) {
  Monomial m;
  m.factors_ = std::move(factors);
  return m;
}

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (const auto& [v, e] : factors_) d += e;
  return d;
}

std::uint32_t Monomial::degree(Sector s) const {
  std::uint32_t d = 0;
  for (const auto& [v, e] : factors_)
    if (v.sector == s) d += e;
  return d;
}

std::uint32_t Monomial::exponent(VariableId v) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                             [](const Factor& f, VariableId id) { return f.first < id; });
  return (it != factors_.end() && it->first == v) ? it->second : 0;
}

Monomial Monomial::restricted(Sector s) const {
  Monomial m;
  for (const auto& f : factors_)
    if (f.first.sector == s) m.factors_.push_back(f);
  return m;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.factors_.reserve(a.factors_.size() + b.factors_.size());
  auto ia = a.factors_.begin();
  auto ib = b.factors_.begin();
  while (ia != a.factors_.end() && ib != b.factors_.end()) {
    if (ia->first < ib->first) {
      r.factors_.push_back(*ia++);
    } else if (ib->first < ia->first) {
      r.factors_.push_back(*ib++);
    } else {
      r.factors_.emplace_back(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  r.factors_.insert(r.factors_.end(), ia, a.factors_.end());
  r.factors_.insert(r.factors_.end(), ib, b.factors_.end());
  return r;
}

bool operator<(const Monomial& a, const Monomial& b) {
  const std::uint32_t da = a.degree();
  const std::uint32_t db = b.degree();
  if (da != db) return da > db;
  auto ia = a.factors_.begin();
  auto ib = b.factors_.begin();
  for (; ia != a.factors_.end() && ib != b.factors_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first < ib->first;
    if (ia->second != ib->second) return ia->second > ib->second;
  }
  // Equal degree and equal prefix implies both are exhausted.
  return false;
}

// -------------------------------------------------------------- Expression

Expression::Expression(Coefficient c) {
  if (!c.is_zero()) terms_.emplace(TermKey{}, std::move(c));
}

Expression::Expression(VariableId v) { terms_.emplace(TermKey{Monomial(v), 0}, Coefficient(1)); }

Expression Expression::hbar(std::uint32_t power) {
  return term(Coefficient(1), Monomial(), power);
}

Expression Expression::term(Coefficient c, Monomial m, std::uint32_t hbar_power) {
  Expression e;
  if (!c.is_zero()) e.terms_.emplace(TermKey{std::move(m), hbar_power}, std::move(c));
  return e;
}

bool Expression::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) {
    return t.first.monomial.is_one() && t.first.hbar_power == 0;
  });
}

int Expression::degree() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, static_cast<int>(k.monomial.degree()));
  return d;
}

int Expression::degree(Sector s) const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, static_cast<int>(k.monomial.degree(s)));
  return d;
}

std::uint32_t Expression::max_hbar_power() const {
  std::uint32_t h = 0;
  for (const auto& [k, c] : terms_) h = std::max(h, k.hbar_power);
  return h;
}

std::set<VariableId> Expression::variables() const {
  std::set<VariableId> vars;
  for (const auto& [k, c] : terms_)
    for (const auto& [v, e] : k.monomial.factors()) vars.insert(v);
  return vars;
}

Coefficient Expression::coefficient(const Monomial& m, std::uint32_t hbar_power) const {
  auto it = terms_.find(TermKey{m, hbar_power});
  return it == terms_.end() ? Coefficient() : it->second;
}

Expression Expression::hbar_component(std::uint32_t power) const {
  Expression r;
  for (const auto& [k, c] : terms_)
    if (k.hbar_power == power) r.terms_.emplace(TermKey{k.monomial, 0}, c);
  return r;
}

void Expression::add_term(const Monomial& m, std::uint32_t h, const Coefficient& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(TermKey{m, h}, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Expression& Expression::operator+=(const Expression& o) {
  for (const auto& [k, c] : o.terms_) add_term(k.monomial, k.hbar_power, c);
  return *this;
}

Expression& Expression::operator-=(const Expression& o) {
  for (const auto& [k, c] : o.terms_) add_term(k.monomial, k.hbar_power, -c);
  return *this;
}

Expression operator*(const Expression& a, const Expression& b) {
  Expression r;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_)
      r.add_term(ka.monomial * kb.monomial, ka.hbar_power + kb.hbar_power, ca * cb);
  return r;
}

Expression& Expression::operator*=(const Expression& o) {
  *this = *this * o;
  return *this;
}

Expression& Expression::operator*=(const Coefficient& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

Expression Expression::operator-() const {
  Expression r = *this;
  for (auto& [k, v] : r.terms_) v = -v;
  return r;
}

Expression Expression::times_hbar(std::uint32_t k) const {
  if (k == 0) return *this;
  Expression r;
  for (const auto& [key, c] : terms_) r.terms_.emplace(TermKey{key.monomial, key.hbar_power + k}, c);
  return r;
}

// ------------------------------------------------------- free operations

Expression pow(const Expression& base, std::uint32_t exponent) {
  Expression result(1);
  Expression b = base;
  while (exponent > 0) {
    if (exponent & 1u) result *= b;
    exponent >>= 1;
    if (exponent > 0) b *= b;
  }
  return result;
}

namespace {

// d^n/dv^n of one monomial; returns false when the derivative vanishes.
bool differentiate_monomial(const Monomial& m, VariableId v, std::uint32_t n, Monomial& out,
                            mpz_class& factor) {
  std::vector<Monomial::Factor> factors(m.factors().begin(), m.factors().end());
  auto it = std::find_if(factors.begin(), factors.end(),
                         [v](const Monomial::Factor& f) { return f.first == v; });
  if (n == 0) {
    out = m;
    factor = 1;
    return true;
  }
  if (it == factors.end() || it->second < n) return false;
  factor = 1;
  for (std::uint32_t k = 0; k < n; ++k) factor *= (it->second - k);
  it->second -= n;
  if (it->second == 0) factors.erase(it);
  out = Monomial::from_sorted(std::move(factors));
  return true;
}

}  // namespace

Expression partial(const Expression& e, VariableId v) { return partial(e, Monomial(v)); }

Expression partial(const Expression& e, const Monomial& multi_index) {
  if (multi_index.is_one()) return e;
  Expression r;
  for (const auto& [k, c] : e.terms()) {
    Monomial m = k.monomial;
    mpz_class total = 1;
    bool alive = true;
    for (const auto& [v, n] : multi_index.factors()) {
      Monomial next;
      mpz_class f;
      if (!differentiate_monomial(m, v, n, next, f)) {
        alive = false;
        break;
      }
      m = std::move(next);
      total *= f;
    }
    if (alive) r.add_term(m, k.hbar_power, c * Coefficient(mpq_class(total)));
  }
  return r;
}

Expression hbar_div(const Expression& e) {
  Expression r;
  const Coefficient minus_i(0, -1);
  for (const auto& [k, c] : e.terms()) {
    if (k.hbar_power == 0) throw NonQuantizedResidual("hbar_div: term without a factor of hbar");
    r.add_term(k.monomial, k.hbar_power - 1, c * minus_i);
  }
  return r;
}

Expression times_i_hbar(const Expression& e) { return (e * Coefficient::i()).times_hbar(1); }

Expression substitute(const Expression& e, const std::map<VariableId, Expression>& map,
                      SubstitutionMode mode) {
  // Cache powers of each substituted variable.
  std::map<std::pair<VariableId, std::uint32_t>, Expression> powers;
  auto power_of = [&](VariableId v, std::uint32_t n) -> const Expression& {
    auto key = std::make_pair(v, n);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    auto m = map.find(v);
    Expression base;
    if (m != map.end()) {
      base = m->second;
    } else if (mode == SubstitutionMode::identity_for_unmapped) {
      base = Expression(v);
    } else {
      throw InputError("substitute: no image for a variable of the expression");
    }
    return powers.emplace(key, pow(base, n)).first->second;
  };

  Expression r;
  for (const auto& [k, c] : e.terms()) {
    Expression t = Expression::term(c, Monomial(), k.hbar_power);
    for (const auto& [v, n] : k.monomial.factors()) {
      t *= power_of(v, n);
      if (t.is_zero()) break;
    }
    r += t;
  }
  return r;
}

std::complex<double> evaluate(const Expression& e,
                              const std::map<VariableId, std::complex<double>>& point,
                              double hbar) {
  std::complex<double> sum = 0.0;
  for (const auto& [k, c] : e.terms()) {
    std::complex<double> t = c.to_complex() * std::pow(hbar, static_cast<double>(k.hbar_power));
    for (const auto& [v, n] : k.monomial.factors()) {
      auto it = point.find(v);
      if (it == point.end()) throw InputError("evaluate: point is missing a variable");
      t *= std::pow(it->second, static_cast<int>(n));
    }
    sum += t;
  }
  return sum;
}

std::vector<SectorPair> sector_decompose(const Expression& e) {
  std::map<Monomial, Expression> groups;
  for (const auto& [k, c] : e.terms()) {
    Monomial classical = k.monomial.restricted(Sector::C);
    Monomial quantum = k.monomial.restricted(Sector::Q);
    groups[classical].add_term(quantum, k.hbar_power, c);
  }
  std::vector<SectorPair> out;
  out.reserve(groups.size());
  for (auto& [m, q] : groups)
    out.push_back({std::move(q), Expression::term(Coefficient(1), m, 0)});
  return out;
}

}  // namespace hqc
