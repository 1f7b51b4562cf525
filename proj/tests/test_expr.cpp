#include "doctest.h"

#include "hqc/expr.hpp"
#include "hqc/random.hpp"
#include "hqc/text.hpp"

using namespace hqc;

namespace {

const Expression qQ = VariableId::qQ();
const Expression pQ = VariableId::pQ();
const Expression qC = VariableId::qC();
const Expression pC = VariableId::pC();
const Expression hbar = Expression::hbar();
const Expression I = Coefficient::i();

Expression P(const char* s) { return parse(s); }

RandomExpressionOptions small_options() {
  RandomExpressionOptions o;
  o.variables = all_variables();
  o.max_degree = 3;
  o.max_terms = 4;
  o.complex_coefficients = true;
  o.max_hbar_power = 1;
  return o;
}

}  // namespace

TEST_CASE("add re-canonicalizes") {
  CHECK(qC + Expression() == qC);
  CHECK((qC * qC + pC) + (-(qC * qC)) == pC);
  const Expression lhs = Expression(Coefficient(2, 3)) * hbar * qQ;
  const Expression rhs = Expression(Coefficient(1, -3)) * hbar * qQ;
  CHECK(lhs + rhs == Expression(3) * hbar * qQ);
  CHECK((qC - qC).is_zero());
  CHECK((qC - qC).terms().empty());
}

TEST_CASE("mul is the pointwise product with additive hbar grading") {
  CHECK((qC + pC) * (qC - pC) == qC * qC - pC * pC);
  CHECK((hbar * qQ) * (hbar * pC) == Expression::hbar(2) * qQ * pC);
  Rng rng(7);
  for (int k = 0; k < 50; ++k) {
    Expression x = random_expression(rng, small_options());
    CHECK(x * Expression(1) == x);
  }
}

TEST_CASE("partial derivatives") {
  CHECK(partial(qC * qC, VariableId::qC()) == Expression(2) * qC);
  CHECK(partial(qQ * pC, VariableId::qC()).is_zero());
  CHECK(partial(qC * pC * pC, VariableId::pC()) == Expression(2) * qC * pC);
  CHECK(partial(hbar * qC, VariableId::qC()) == hbar);
}

TEST_CASE("hbar_div") {
  CHECK(hbar_div(I * hbar * qC) == qC);
  CHECK(hbar_div(Expression(2) * Expression::hbar(2) * pQ) ==
        Expression(Coefficient(0, -2)) * hbar * pQ);
  CHECK_THROWS_AS(hbar_div(qC + I * hbar * pC), NonQuantizedResidual);
  CHECK(hbar_div(Expression()).is_zero());
}

TEST_CASE("substitute") {
  std::map<VariableId, Expression> shift{{VariableId::qC(), qC + pC}};
  CHECK(substitute(qC * qC, shift) == qC * qC + Expression(2) * qC * pC + pC * pC);
  Rng rng(11);
  Expression x = random_expression(rng, small_options());
  CHECK(substitute(x, {}) == x);
  std::map<VariableId, Expression> m{{VariableId::qQ(), Expression(2) * qQ},
                                     {VariableId::pC(), Expression()}};
  CHECK(substitute(qQ * pC, m).is_zero());
  CHECK_NOTHROW(substitute(qQ * pC, m, SubstitutionMode::require_total));
  CHECK_THROWS_AS(substitute(qQ * qC, m, SubstitutionMode::require_total), InputError);
}

TEST_CASE("evaluate") {
  using C = std::complex<double>;
  const std::map<VariableId, C> point{{VariableId::qC(), 2.0}, {VariableId::pC(), 3.0}};
  CHECK(evaluate(qC * pC, point, 1.0) == C(6.0));
  CHECK(evaluate(hbar * qQ, {{VariableId::qQ(), 1.0}}, 0.5) == C(0.5));
  CHECK(evaluate(Expression(), {}, 1.0) == C(0.0));
  CHECK(evaluate(I * hbar, {}, 2.0) == C(0.0, 2.0));
  CHECK_THROWS_AS(evaluate(qC, {}, 1.0), InputError);
}

TEST_CASE("sector_decompose") {
  auto d = sector_decompose(qQ * qC * qC);
  REQUIRE(d.size() == 1);
  CHECK(d[0].quantum == qQ);
  CHECK(d[0].classical == qC * qC);

  d = sector_decompose(qQ * qC + pQ * pC);
  REQUIRE(d.size() == 2);
  CHECK(d[0].quantum == qQ);
  CHECK(d[0].classical == qC);
  CHECK(d[1].quantum == pQ);
  CHECK(d[1].classical == pC);

  d = sector_decompose(qC);
  REQUIRE(d.size() == 1);
  CHECK(d[0].quantum == Expression(1));
  CHECK(d[0].classical == qC);
}

TEST_CASE("ring axioms, derivation, and reassembly on random expressions") {
  Rng rng(2024);
  const auto opts = small_options();
  const auto vars = all_variables();
  for (int trial = 0; trial < 100; ++trial) {
    const Expression a = random_expression(rng, opts);
    const Expression b = random_expression(rng, opts);
    const Expression c = random_expression(rng, opts);
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a - a).is_zero());

    const VariableId x = vars[uniform_below(rng, vars.size())];
    const VariableId y = vars[uniform_below(rng, vars.size())];
    CHECK(partial(a * b, x) == partial(a, x) * b + a * partial(b, x));
    CHECK(partial(partial(c, x), y) == partial(partial(c, y), x));

    CHECK(hbar_div(times_i_hbar(a)) == a);

    Expression sum;
    for (const auto& pair : sector_decompose(a)) {
      CHECK(!pair.quantum.involves(Sector::C));
      CHECK(!pair.classical.involves(Sector::Q));
      sum += pair.quantum * pair.classical;
    }
    CHECK(sum == a);

    std::map<VariableId, Expression> image{{x, random_expression(rng, opts)},
                                           {y, random_expression(rng, opts)}};
    CHECK(substitute(a * b, image) == substitute(a, image) * substitute(b, image));
  }
}

TEST_CASE("coefficient square roots") {
  Coefficient r;
  CHECK(gaussian_sqrt(Coefficient(-1), r));
  CHECK(r == Coefficient::i());
  CHECK(gaussian_sqrt(Coefficient(mpq_class(9, 4)), r));
  CHECK(r == Coefficient(mpq_class(3, 2)));
  CHECK(gaussian_sqrt(Coefficient(-3, 4), r));  // (1+2i)^2
  CHECK(r * r == Coefficient(-3, 4));
  CHECK_FALSE(gaussian_sqrt(Coefficient(2), r));
  CHECK_FALSE(gaussian_sqrt(Coefficient(0, 1), r));
}

TEST_CASE("multiple degrees of freedom are independent variables") {
  const Expression q1 = VariableId::qC(1);
  CHECK(partial(q1 * qC, VariableId::qC(1)) == qC);
  CHECK(P("qC1*qC") == q1 * qC);
}
