#include "hqc/bidifferential.hpp"

namespace hqc {

Bidifferential Bidifferential::pointwise() {
  Bidifferential op;
  op.add(Monomial(), Monomial(), Coefficient(1));
  return op;
}

void Bidifferential::add(const Monomial& left, const Monomial& right, const Coefficient& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(Key{left, right}, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Bidifferential Bidifferential::compose(const Bidifferential& other) const {
  Bidifferential r;
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : other.terms_)
      r.add(ka.first * kb.first, ka.second * kb.second, ca * cb);
  return r;
}

Bidifferential Bidifferential::power(std::uint32_t n) const {
  Bidifferential r = pointwise();
  for (std::uint32_t k = 0; k < n; ++k) r = r.compose(*this);
  return r;
}

Bidifferential Bidifferential::transpose() const {
  Bidifferential r;
  for (const auto& [k, c] : terms_) r.add(k.second, k.first, c);
  return r;
}

Expression Bidifferential::apply(const Expression& u, const Expression& v) const {
  std::map<Monomial, Expression> left_cache;
  std::map<Monomial, Expression> right_cache;
  auto derivative = [](std::map<Monomial, Expression>& cache, const Expression& e,
                       const Monomial& alpha) -> const Expression& {
    auto it = cache.find(alpha);
    if (it == cache.end()) it = cache.emplace(alpha, partial(e, alpha)).first;
    return it->second;
  };
  Expression out;
  for (const auto& [k, c] : terms_) {
    const Expression& du = derivative(left_cache, u, k.first);
    if (du.is_zero()) continue;
    const Expression& dv = derivative(right_cache, v, k.second);
    if (dv.is_zero()) continue;
    out += (du * dv) * c;
  }
  return out;
}

Bidifferential& Bidifferential::operator+=(const Bidifferential& o) {
  for (const auto& [k, c] : o.terms_) add(k.first, k.second, c);
  return *this;
}

Bidifferential operator*(const Coefficient& c, Bidifferential op) {
  if (c.is_zero()) return {};
  for (auto& [k, v] : op.terms_) v *= c;
  return op;
}

std::set<std::uint32_t> dof_indices(Sector s, const Expression& u, const Expression& v) {
  std::set<std::uint32_t> dofs;
  for (const Expression* e : {&u, &v})
    for (VariableId id : e->variables())
      if (id.sector == s) dofs.insert(id.index);
  return dofs;
}

Bidifferential poisson_operator(Sector s, const std::set<std::uint32_t>& dofs) {
  Bidifferential op;
  for (std::uint32_t k : dofs) {
    const Monomial q(VariableId{s, Kind::position, k});
    const Monomial p(VariableId{s, Kind::momentum, k});
    op.add(q, p, Coefficient(1));
    op.add(p, q, Coefficient(-1));
  }
  return op;
}

}  // namespace hqc
