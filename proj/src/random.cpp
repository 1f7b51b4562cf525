#include "hqc/random.hpp"

namespace hqc {

namespace {

Monomial draw_monomial(Rng& rng, const std::vector<VariableId>& vars, int degree) {
  Monomial m;
  for (int k = 0; k < degree; ++k) m = m * Monomial(vars[uniform_below(rng, vars.size())]);
  return m;
}

mpq_class draw_rational(Rng& rng, int range) {
  const auto span = static_cast<std::uint64_t>(2 * range + 1);
  long num = static_cast<long>(uniform_below(rng, span)) - range;
  long den = static_cast<long>(uniform_below(rng, 3)) + 1;
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace

Expression random_expression(Rng& rng, const RandomExpressionOptions& options) {
  Expression e;
  const int terms = 1 + static_cast<int>(uniform_below(rng, options.max_terms));
  for (int t = 0; t < terms; ++t) {
    const int degree = static_cast<int>(uniform_below(rng, options.max_degree + 1));
    Monomial m = options.variables.empty() ? Monomial()
                                           : draw_monomial(rng, options.variables, degree);
    mpq_class re = draw_rational(rng, options.coefficient_range);
    mpq_class im = options.complex_coefficients ? draw_rational(rng, options.coefficient_range)
                                                : mpq_class(0);
    const auto h = options.max_hbar_power > 0
                       ? static_cast<std::uint32_t>(uniform_below(rng, options.max_hbar_power + 1))
                       : 0u;
    e.add_term(m, h, Coefficient(re, im));
  }
  return e;
}

Expression random_monomial(Rng& rng, const std::vector<VariableId>& variables, int max_degree) {
  const int degree = 1 + static_cast<int>(uniform_below(rng, max_degree));
  return Expression::term(Coefficient(1), draw_monomial(rng, variables, degree));
}

std::vector<VariableId> quantum_variables(std::uint32_t dofs) {
  std::vector<VariableId> v;
  for (std::uint32_t k = 0; k < dofs; ++k) {
    v.push_back(VariableId::qQ(k));
    v.push_back(VariableId::pQ(k));
  }
  return v;
}

std::vector<VariableId> classical_variables(std::uint32_t dofs) {
  std::vector<VariableId> v;
  for (std::uint32_t k = 0; k < dofs; ++k) {
    v.push_back(VariableId::qC(k));
    v.push_back(VariableId::pC(k));
  }
  return v;
}

std::vector<VariableId> all_variables(std::uint32_t dofs) {
  auto v = quantum_variables(dofs);
  auto c = classical_variables(dofs);
  v.insert(v.end(), c.begin(), c.end());
  return v;
}

}  // namespace hqc
