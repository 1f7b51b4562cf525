#include "hqc/products.hpp"

#include <algorithm>

namespace hqc {

Bidifferential sigma_operator(const SigmaSpec& s, Sector sector,
                              const std::set<std::uint32_t>& dofs) {
  Bidifferential op;
  for (std::uint32_t k : dofs) {
    const Monomial q(VariableId{sector, Kind::position, k});
    const Monomial p(VariableId{sector, Kind::momentum, k});
    op.add(q, q, s.a);
    op.add(p, p, s.b);
    op.add(q, p, s.c);
    op.add(p, q, s.c);
  }
  return op;
}

ProductSpec ProductSpec::with_zeroth_order_sigma(SigmaSpec sigma_c, Coefficient d) {
  ProductSpec spec(std::move(sigma_c));
  spec.sigma_c_zeroth_ = std::move(d);
  return spec;
}

Expression poisson(const Expression& u, const Expression& v, PoissonSectors sectors) {
  Expression out;
  if (sectors != PoissonSectors::C)
    out += poisson_operator(Sector::Q, dof_indices(Sector::Q, u, v)).apply(u, v);
  if (sectors != PoissonSectors::Q)
    out += poisson_operator(Sector::C, dof_indices(Sector::C, u, v)).apply(u, v);
  return out;
}

Expression sigma_product(const Expression& u, const Expression& v, const SigmaSpec& s) {
  return sigma_operator(s, Sector::C, dof_indices(Sector::C, u, v)).apply(u, v);
}

Expression sigma_product(const Expression& u, const Expression& v, const ProductSpec& spec) {
  Expression out = sigma_product(u, v, spec.sigma_c());
  if (!spec.is_first_order()) out += (u * v) * spec.sigma_c_zeroth();
  return out;
}

namespace {

const Coefficient kHalf(mpq_class(1, 2));

}  // namespace

Expression g_product(const Expression& u, const Expression& v, const SigmaSpec& s) {
  return g_product(u, v, ProductSpec(s));
}

Expression g_product(const Expression& u, const Expression& v, const ProductSpec& spec) {
  return (poisson(u, v, PoissonSectors::C) + sigma_product(u, v, spec)) * kHalf;
}

Expression ast_product(const Expression& u, const Expression& v, const SigmaSpec& s) {
  return ast_product(u, v, ProductSpec(s));
}

Expression ast_product(const Expression& u, const Expression& v, const ProductSpec& spec) {
  return u * v + times_i_hbar(g_product(u, v, spec));
}

Expression star_q(const Expression& u, const Expression& v, const ProductSpec& spec) {
  const int du = u.degree(Sector::Q);
  const int dv = v.degree(Sector::Q);
  Expression out = u * v;
  const int order = std::min(du, dv);
  if (order <= 0) return out;

  const auto dofs = dof_indices(Sector::Q, u, v);
  const Bidifferential generator =
      poisson_operator(Sector::Q, dofs) + sigma_operator(spec.sigma_q(), Sector::Q, dofs);
  Bidifferential power = Bidifferential::pointwise();
  // (i/2)^n / n!
  Coefficient weight(1);
  const Coefficient half_i(0, mpq_class(1, 2));
  for (int n = 1; n <= order; ++n) {
    power = power.compose(generator);
    weight *= half_i;
    weight /= Coefficient(n);
    out += (power.apply(u, v) * weight).times_hbar(static_cast<std::uint32_t>(n));
  }
  return out;
}

Expression hybrid_product(const Expression& u, const Expression& v, const ProductSpec& spec) {
  const auto us = sector_decompose(u);
  const auto vs = sector_decompose(v);
  Expression out;
  for (const auto& a : us)
    for (const auto& b : vs)
      out += star_q(a.quantum, b.quantum, spec) * ast_product(a.classical, b.classical, spec);
  return out;
}

Expression quantum_bracket(const Expression& u, const Expression& v, const ProductSpec& spec) {
  return hbar_div(star_q(u, v, spec) - star_q(v, u, spec));
}

namespace {

Expression bracket_f1(const Expression& u, const Expression& v, const ProductSpec& spec) {
  Expression out = quantum_bracket(u, v, spec);
  for (const auto& a : sector_decompose(u)) {
    for (const auto& b : sector_decompose(v)) {
      out += star_q(a.quantum, b.quantum, spec) * g_product(a.classical, b.classical, spec);
      out -= star_q(b.quantum, a.quantum, spec) * g_product(b.classical, a.classical, spec);
    }
  }
  return out;
}

Expression bracket_f2(const Expression& u, const Expression& v, const ProductSpec& spec) {
  Expression out = quantum_bracket(u, v, spec);
  for (const auto& a : sector_decompose(u)) {
    for (const auto& b : sector_decompose(v)) {
      const Expression forward = star_q(a.quantum, b.quantum, spec);
      const Expression backward = star_q(b.quantum, a.quantum, spec);
      out += ((forward + backward) * poisson(a.classical, b.classical, PoissonSectors::C)) * kHalf;
      out += ((forward - backward) * sigma_product(a.classical, b.classical, spec)) * kHalf;
    }
  }
  return out;
}

Expression bracket_f3(const Expression& u, const Expression& v, const ProductSpec& spec) {
  return hbar_div(hybrid_product(u, v, spec) - hybrid_product(v, u, spec));
}

}  // namespace

Expression hybrid_bracket_factored(const Expression& u, const Expression& v_q,
                                   const Expression& v_c, const ProductSpec& spec) {
  return hybrid_product(quantum_bracket(u, v_q, spec), v_c, spec) +
         star_q(v_q, poisson(u, v_c, PoissonSectors::C), spec);
}

Expression hybrid_bracket(const Expression& u, const Expression& v, const ProductSpec& spec,
                          BracketForm form) {
  switch (form) {
    case BracketForm::F1:
      return bracket_f1(u, v, spec);
    case BracketForm::F2:
      return bracket_f2(u, v, spec);
    case BracketForm::F3:
      return bracket_f3(u, v, spec);
    case BracketForm::F4: {
      Expression out;
      for (const auto& b : sector_decompose(v))
        out += hybrid_bracket_factored(u, b.quantum, b.classical, spec);
      return out;
    }
  }
  return {};
}

Expression weyl_hybrid_bracket(const Expression& u, const Expression& v, const ProductSpec& spec) {
  Expression out = quantum_bracket(u, v, spec);
  for (const auto& a : sector_decompose(u))
    for (const auto& b : sector_decompose(v))
      out += ((star_q(a.quantum, b.quantum, spec) + star_q(b.quantum, a.quantum, spec)) *
              poisson(a.classical, b.classical, PoissonSectors::C)) *
             kHalf;
  return out;
}

}  // namespace hqc
