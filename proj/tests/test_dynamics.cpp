#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hqc/dynamics.hpp"
#include "hqc/random.hpp"
#include "hqc/text.hpp"

using namespace hqc;

namespace {

const Expression qQ = VariableId::qQ();
const Expression pQ = VariableId::pQ();
const Expression qC = VariableId::qC();
const Expression pC = VariableId::pC();
const Expression half = Coefficient(mpq_class(1, 2));

Expression rational(long num, long den) { return Coefficient(mpq_class(num, den)); }

HybridSystem oscillator(const Expression& lambda, SigmaSpec sigma_c = {}) {
  return HybridSystem(half * (pQ * pQ + qQ * qQ), half * (pC * pC + qC * qC), lambda * qQ * qC,
                      ProductSpec(sigma_c));
}

std::vector<double> grid(double stop, int steps) {
  std::vector<double> t;
  for (int k = 0; k <= steps; ++k) t.push_back(stop * k / steps);
  return t;
}

GaussianState product_state(double hbar = 1.0) {
  Matrix cov(4, 4);
  cov(0, 0) = 0.5;   // qQ
  cov(1, 1) = 0.5;   // pQ
  cov(2, 2) = 0.3;   // qC
  cov(3, 3) = 0.2;   // pC
  cov(2, 3) = cov(3, 2) = 0.05;
  return GaussianState::make({VariableId::qQ(), VariableId::pQ(), VariableId::qC(), VariableId::pC()},
                             {0.4, -0.2, 1.0, 0.5}, cov, hbar);
}

// Closed form for the unit oscillator pair coupled by λ qQ qC: normal modes
// (qQ ± qC)/√2 with ω² = 1 ± λ. Row of z(t) in terms of z(0) = (qQ, pQ, qC, pC).
std::vector<std::vector<double>> coupled_map(double lambda, double t) {
  const double wp = std::sqrt(1 + lambda), wm = std::sqrt(1 - lambda);
  const double cp = std::cos(wp * t), cm = std::cos(wm * t);
  const double sp = std::sin(wp * t), sm = std::sin(wm * t);
  const double cs = (cp + cm) / 2, cd = (cp - cm) / 2;
  const double ss = (sp / wp + sm / wm) / 2, sd = (sp / wp - sm / wm) / 2;
  const double ds = -(wp * sp + wm * sm) / 2, dd = -(wp * sp - wm * sm) / 2;
  return {{cs, ss, cd, sd}, {ds, cs, dd, cd}, {cd, sd, cs, ss}, {dd, cd, ds, cs}};
}

// Wick's theorem by explicit enumeration of pairings (central moments).
double wick(std::vector<std::size_t> idx, const Matrix& cov) {
  if (idx.empty()) return 1.0;
  if (idx.size() % 2) return 0.0;
  double sum = 0.0;
  const auto first = idx[0];
  for (std::size_t j = 1; j < idx.size(); ++j) {
    std::vector<std::size_t> rest;
    for (std::size_t k = 1; k < idx.size(); ++k)
      if (k != j) rest.push_back(idx[k]);
    sum += cov(first, idx[j]) * wick(rest, cov);
  }
  return sum;
}

}  // namespace

TEST_CASE("HybridSystem validation and consistency flag") {
  CHECK_THROWS_AS(HybridSystem(qC, Expression(), Expression()), InputError);
  CHECK_THROWS_AS(HybridSystem(Expression(), qQ, Expression()), InputError);
  for (const auto& s : std::vector<SigmaSpec>{{}, {1, 1, 0}, {-1, 0, 1}})
    CHECK(oscillator(rational(1, 10), s).consistent_hybrid());
  HybridSystem bad(pQ * pQ, pC * pC, qQ * qC * qC + pQ * pC);
  CHECK_FALSE(bad.consistent_hybrid());
  auto vars = HybridSystem(pQ * pQ, Expression(), qQ * pC).canonical_variables();
  CHECK(vars == std::vector<VariableId>{VariableId::qQ(), VariableId::pQ(), VariableId::qC(),
                                        VariableId::pC()});
}

TEST_CASE("eom examples") {
  CHECK(eom(qC, HybridSystem(Expression(), half * pC * pC, Expression())) == pC);
  HybridSystem sys(half * pQ * pQ, half * pC * pC, rational(3, 7) * qQ * qC);
  CHECK(eom(qQ, sys) == pQ);
  CHECK(eom(pC, sys) == -rational(3, 7) * qQ);
  CHECK(eom(pQ, sys) == -rational(3, 7) * qC);
  CHECK(eom(qC, sys) == pC);
}

TEST_CASE("eom reduces for pure variables") {
  Rng rng(31);
  RandomExpressionOptions q{quantum_variables(), 3, 3, 4, false, 0};
  RandomExpressionOptions c{classical_variables(), 3, 3, 4, false, 0};
  RandomExpressionOptions hyb{all_variables(), 3, 3, 4, false, 0};
  for (const auto& s : std::vector<SigmaSpec>{{}, {1, 0, -1}, {0, 1, 1}}) {
    for (int t = 0; t < 10; ++t) {
      HybridSystem sys(random_expression(rng, q), random_expression(rng, c),
                       random_expression(rng, hyb), ProductSpec(s));
      auto fq = random_expression(rng, q);
      auto fc = random_expression(rng, c);
      CHECK(eom(fq, sys) == quantum_bracket(fq, sys.h_q() + sys.h_i(), sys.spec()));
      CHECK(eom(fc, sys) == poisson(fc, sys.h_c() + sys.h_i()));
    }
  }
}

TEST_CASE("linearize") {
  auto lin = linearize(oscillator(rational(1, 10)));
  REQUIRE(lin.variables.size() == 4);
  const Coefficient l(mpq_class(1, 10));
  std::vector<std::vector<Coefficient>> m{
      {0, 1, 0, 0}, {-1, 0, -l, 0}, {0, 0, 0, 1}, {-l, 0, -1, 0}};
  CHECK(lin.m == m);
  for (const auto& b : lin.b) CHECK(b.is_zero());

  auto free = linearize(HybridSystem(Expression(), half * pC * pC, Expression()));
  REQUIRE(free.variables.size() == 2);
  CHECK(free.m[0][1] == Coefficient(1));
  CHECK(free.m[1][0].is_zero());
  CHECK(free.m[1][1].is_zero());

  auto driven = linearize(HybridSystem(Expression(), half * pC * pC + Expression(3) * qC, Expression()));
  CHECK(driven.b[1] == Coefficient(-3));

  CHECK_THROWS_AS(linearize(HybridSystem(Expression(), pC * pC + qC * qC * qC, Expression())),
                  NonlinearSystem);
}

TEST_CASE("matrix exponential against the closed form") {
  HybridSystem free(Expression(), half * (pC * pC + qC * qC), Expression());
  auto quarter = propagate(free, {0.0, std::numbers::pi / 2}, Method::matrix_exponential);
  CHECK(std::abs(quarter.maps[1](0, 0)) < 1e-12);
  CHECK(std::abs(quarter.maps[1](0, 1) - 1.0) < 1e-12);
  CHECK(quarter.maps[0] == Matrix::identity(2));

  auto times = grid(10.0, 50);
  auto traj = propagate(oscillator(rational(1, 10)), times, Method::matrix_exponential);
  double worst = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    auto exact = coupled_map(0.1, times[k]);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(traj.maps[k](i, j) - exact[i][j]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("matrix exponential group property") {
  auto traj = propagate(oscillator(rational(3, 10), {1, 0, 1}), {0.0, 1.3, 2.9, 4.2},
                        Method::matrix_exponential);
  auto product = traj.maps[1] * traj.maps[2];
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(product(i, j) - traj.maps[3](i, j)) < 1e-12);
}

TEST_CASE("affine drift") {
  // q̇ = p, ṗ = −g: q(t) = q + p t − g t²/2.
  HybridSystem fall(Expression(), half * pC * pC + Expression(2) * qC, Expression());
  auto traj = propagate(fall, {0.0, 1.5}, Method::matrix_exponential);
  CHECK(std::abs(traj.offsets[1][0] + 2.25) < 1e-13);
  CHECK(std::abs(traj.maps[1](0, 1) - 1.5) < 1e-13);
  auto rk = propagate(fall, {0.0, 1.5}, Method::rk4);
  CHECK(std::abs(rk.offsets[1][0] + 2.25) < 1e-12);
}

TEST_CASE("rk4 and taylor agree with the matrix exponential") {
  auto sys = oscillator(rational(1, 10));
  auto times = grid(10.0, 10);
  auto exact = propagate(sys, times, Method::matrix_exponential);
  auto rk = propagate(sys, times, Method::rk4);
  auto tay = propagate(sys, times, Method::taylor);
  double rk_err = 0.0, tay_err = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        rk_err = std::max(rk_err, std::abs(rk.maps[k](i, j) - exact.maps[k](i, j)));
        auto c = tay.evolved[k][i].coefficient(Monomial(exact.variables[j])).to_complex();
        tay_err = std::max(tay_err, std::abs(c - exact.maps[k](i, j)));
      }
  CHECK(rk_err < 1e-8);
  CHECK(tay_err < 1e-10);
}

TEST_CASE("decoupled sectors bit-match the per-sector runs") {
  auto times = grid(10.0, 40);
  auto full = propagate(oscillator(Expression()), times, Method::matrix_exponential);
  auto q = propagate(HybridSystem(half * (pQ * pQ + qQ * qQ), Expression(), Expression()), times,
                     Method::matrix_exponential);
  auto c = propagate(HybridSystem(Expression(), half * (pC * pC + qC * qC), Expression()), times,
                     Method::matrix_exponential);
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(full.maps[k](i, j) == q.maps[k](i, j));
        CHECK(full.maps[k](i + 2, j + 2) == c.maps[k](i, j));
        CHECK(full.maps[k](i, j + 2) == 0.0);
      }
}

TEST_CASE("taylor tracks nonlinear observables") {
  // Anharmonic classical oscillator: H = p²/2 + q⁴/4 blows up the degree quickly.
  HybridSystem quartic(Expression(), half * pC * pC + rational(1, 4) * pow(qC, 4), Expression());
  PropagationOptions opts;
  opts.degree_cap = 12;
  CHECK_THROWS_AS(propagate(quartic, {0.0, 0.1}, Method::taylor, opts), DegreeBlowup);

  PropagationOptions coarse;
  coarse.taylor_order = 2;
  coarse.taylor_dt = 1.0;
  CHECK_THROWS_AS(propagate(oscillator(rational(1, 10)), {0.0, 1.0}, Method::taylor, coarse),
                  StepRejected);

  // Quadratic H with σ ≠ 0: the evolved q_C² is tracked directly.
  auto sys = oscillator(rational(1, 10), {1, 1, 0});
  PropagationOptions track;
  track.observables = {qC * qC};
  auto traj = propagate(sys, {0.0, 0.5}, Method::taylor, track);
  REQUIRE(traj.evolved_observables.size() == 2);
  CHECK(traj.evolved_observables[0][0] == qC * qC);
  CHECK(traj.evolved_observables[1][0].degree() == 2);
}

TEST_CASE("gaussian_expectation") {
  Matrix cov(2, 2);
  cov(0, 0) = 0.7;
  cov(1, 1) = 1.9;
  auto s = GaussianState::make({VariableId::qQ(), VariableId::qC()}, {0.0, 0.0}, cov, 1.0);
  CHECK(gaussian_expectation(qC * qC, s).real() == doctest::Approx(1.9));
  CHECK(gaussian_expectation(qQ * qQ * qC * qC, s).real() == doctest::Approx(0.7 * 1.9));
  CHECK(gaussian_expectation(pow(qC, 4), s).real() == doctest::Approx(3 * 1.9 * 1.9));
  CHECK(gaussian_expectation(Expression::hbar(2) * Expression(3), GaussianState::make({}, {}, Matrix(), 0.5))
            .real() == doctest::Approx(0.75));

  // Correlated covariance against explicit Wick pairings.
  Rng rng(41);
  Matrix c3(3, 3);
  double raw[3][3] = {{1.2, 0.3, -0.2}, {0.3, 0.8, 0.1}, {-0.2, 0.1, 0.5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c3(i, j) = raw[i][j];
  std::vector<VariableId> vars{VariableId::qC(), VariableId::pC(), VariableId::qC(1)};
  auto centered = GaussianState::make(vars, {0, 0, 0}, c3, 1.0);
  for (int t = 0; t < 30; ++t) {
    auto m = random_monomial(rng, vars, 6);
    std::vector<std::size_t> idx;
    for (const auto& [v, e] : m.terms().begin()->first.monomial.factors())
      for (std::uint32_t k = 0; k < e; ++k) idx.push_back(centered.index_of(v));
    CHECK(gaussian_expectation(m, centered).real() == doctest::Approx(wick(idx, c3)).epsilon(1e-12));
  }
  // Mean shift: E[(μ + x)³] = μ³ + 3μσ².
  Matrix one(1, 1);
  one(0, 0) = 0.4;
  auto shifted = GaussianState::make({VariableId::qC()}, {1.5}, one, 1.0);
  CHECK(gaussian_expectation(pow(qC, 3), shifted).real() == doctest::Approx(1.5 * 1.5 * 1.5 + 3 * 1.5 * 0.4));
  CHECK_THROWS_AS(gaussian_expectation(pC, shifted), InputError);
}

TEST_CASE("GaussianState validation") {
  Matrix cross(2, 2);
  cross(0, 0) = cross(1, 1) = 1.0;
  cross(0, 1) = cross(1, 0) = 0.1;
  CHECK_THROWS_AS(GaussianState::make({VariableId::qQ(), VariableId::qC()}, {0, 0}, cross, 1.0),
                  InputError);
  Matrix neg(1, 1);
  neg(0, 0) = -1.0;
  CHECK_THROWS_AS(GaussianState::make({VariableId::qC()}, {0}, neg, 1.0), InputError);
  Matrix squeezed(2, 2);
  squeezed(0, 0) = 0.1;
  squeezed(1, 1) = 0.1;
  auto s = GaussianState::make({VariableId::qQ(), VariableId::pQ()}, {0, 0}, squeezed, 1.0);
  CHECK(s.warnings.size() == 1);
  CHECK(product_state().warnings.empty());
}

TEST_CASE("expectation along a trajectory") {
  HybridSystem free(Expression(), half * pC * pC, Expression());
  Matrix cov(2, 2);
  cov(0, 0) = 0.2;
  cov(1, 1) = 0.3;
  auto state = GaussianState::make({VariableId::qC(), VariableId::pC()}, {1.0, 0.25}, cov, 1.0);
  auto times = grid(4.0, 8);
  auto traj = propagate(free, times, Method::matrix_exponential);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(expectation(qC, traj, state, k).real() == doctest::Approx(1.0 + 0.25 * times[k]));
    // Var q(t) = var q + t² var p.
    auto second = expectation(qC * qC, traj, state, k).real();
    auto mean = 1.0 + 0.25 * times[k];
    CHECK(second - mean * mean == doctest::Approx(0.2 + times[k] * times[k] * 0.3));
  }
  CHECK(traj.time_index(2.0) == 4);
  CHECK_THROWS_AS(traj.time_index(0.3), InputError);
}

TEST_CASE("canonical audits") {
  auto times = grid(10.0, 20);
  auto decoupled = oscillator(Expression());
  auto t0 = propagate(decoupled, times, Method::matrix_exponential);
  auto coupled = oscillator(rational(1, 10));
  auto t1 = propagate(coupled, times, Method::matrix_exponential);
  double worst_poisson = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    auto a0 = canonical_audit(t0, decoupled, k);
    CHECK(a0.hybrid_max_abs_dev < 1e-12);
    CHECK(a0.poisson_max_abs_dev < 1e-12);
    CHECK(a0.moyal_max_abs_dev < 1e-12);
    auto a1 = canonical_audit(t1, coupled, k);
    CHECK(a1.hybrid_max_abs_dev < 1e-9);
    worst_poisson = std::max(worst_poisson, a1.poisson_max_abs_dev);
  }
  CHECK(worst_poisson > 1e-3);

  auto skewed = oscillator(rational(1, 10), {1, -1, 1});
  auto t2 = propagate(skewed, times, Method::matrix_exponential);
  CHECK(canonical_audit(t2, skewed, 20).hybrid_max_abs_dev < 1e-9);
}

TEST_CASE("conserved products") {
  auto times = grid(10.0, 20);
  auto state = product_state();
  auto decoupled = oscillator(Expression());
  auto traj = propagate(decoupled, times, Method::matrix_exponential);
  auto r = conserved_product_check(decoupled, decoupled.h_q(), decoupled.h_c(), traj, state);
  CHECK(r.conserved);
  CHECK(r.max_abs_drift < 1e-12);
  CHECK(conserved_product_check(decoupled, Expression(1), decoupled.h_c(), traj, state).conserved);

  // A second, free pair next to the coupled oscillator.
  const Expression pQ1 = VariableId::pQ(1), pC1 = VariableId::pC(1);
  HybridSystem wide(half * (pQ * pQ + qQ * qQ + pQ1 * pQ1), half * (pC * pC + qC * qC + pC1 * pC1),
                    rational(1, 10) * qQ * qC);
  auto wide_traj = propagate(wide, times, Method::matrix_exponential);
  Matrix cov = Matrix::identity(8);
  std::vector<double> mean{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  auto wide_state = GaussianState::make(wide_traj.variables, mean, 0.5 * cov, 1.0);
  CHECK(conserved_product_check(wide, pQ1, pC1, wide_traj, wide_state).conserved);
  CHECK_THROWS_AS(conserved_product_check(wide, qQ, pC1, wide_traj, wide_state), NotConserved);
}

TEST_CASE("backreaction report") {
  auto times = grid(10.0, 40);
  auto state = product_state();
  auto none = backreaction_report(oscillator(Expression()), state, times);
  CHECK(none.max_mean_deviation == 0.0);
  CHECK(none.max_covariance_deviation == 0.0);

  Matrix cov(4, 4);
  cov(0, 0) = 2.0;
  cov(1, 1) = 0.125;
  cov(2, 2) = 0.3;
  cov(3, 3) = 0.3;
  auto squeezed = GaussianState::make(state.variables, {0, 0, 0, 0}, cov, 1.0);
  auto coupled = backreaction_report(oscillator(rational(1, 10)), squeezed, times);
  CHECK(coupled.max_covariance_deviation > 1e-3);
  CHECK(coupled.energy_drift < 1e-8);
  // Finite differences of ⟨H_I⟩ track the bracket form.
  for (std::size_t k = 1; k + 1 < times.size(); ++k)
    CHECK(std::abs(coupled.h_i_rate_numeric[k] - coupled.h_i_rate_bracket[k]) < 5e-3);

  auto tay = backreaction_report(oscillator(rational(1, 10), {1, 1, 0}), squeezed, grid(2.0, 4),
                                 Method::taylor);
  CHECK(tay.energy_drift < 1e-9);
}
