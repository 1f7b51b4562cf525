#include "hqc/consistency.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "hqc/random.hpp"
#include "hqc/text.hpp"

namespace hqc {

ResidualReport ResidualReport::of(Expression residual, std::vector<Expression> inputs) {
  ResidualReport r;
  r.is_zero = residual.is_zero();
  if (!r.is_zero) r.witness = std::move(inputs);
  r.residual = std::move(residual);
  return r;
}

namespace {

Expression apply_product(const Expression& x, const Expression& y, ProductKind product,
                         const ProductSpec& spec) {
  switch (product) {
    case ProductKind::composition: return ast_product(x, y, spec);
    case ProductKind::star: return star_q(x, y, spec);
    case ProductKind::hybrid: return hybrid_product(x, y, spec);
    case ProductKind::pointwise: return x * y;
    case ProductKind::g: return g_product(x, y, spec);
  }
  throw std::logic_error("unknown product");
}

// Keeps the first failing trial, or a zero report when all pass.
void keep_first_failure(ResidualReport& acc, ResidualReport next) {
  if (acc.is_zero && !next.is_zero) acc = std::move(next);
}

}  // namespace

Expression associator(const Expression& u, const Expression& v, const Expression& w,
                      ProductKind product, const ProductSpec& spec) {
  auto left = apply_product(apply_product(u, v, product, spec), w, product, spec);
  auto right = apply_product(u, apply_product(v, w, product, spec), product, spec);
  return left - right;
}

ResidualReport jacobi_residual(const Expression& u, const Expression& v, const Expression& w,
                               const ProductSpec& spec) {
  auto br = [&](const Expression& x, const Expression& y) { return hybrid_bracket(x, y, spec); };
  auto r = br(br(u, v), w) + br(br(v, w), u) + br(br(w, u), v);
  return ResidualReport::of(std::move(r), {u, v, w});
}

LeibnizReport leibniz_residual(const Expression& u, const Expression& v, const Expression& w,
                               const ProductSpec& spec) {
  auto br = [&](const Expression& x, const Expression& y) { return hybrid_bracket(x, y, spec); };
  auto uv = br(u, v);
  auto uw = br(u, w);
  LeibnizReport out;
  out.composition = ResidualReport::of(
      br(u, hybrid_product(v, w, spec)) - hybrid_product(uv, w, spec) - hybrid_product(v, uw, spec),
      {u, v, w});
  out.pointwise = ResidualReport::of(br(u, v * w) - uv * w - v * uw, {u, v, w});
  return out;
}

ReductionReport check_reduction(const ProductSpec& spec, std::uint64_t seed, int trials) {
  Rng rng(seed);
  RandomExpressionOptions q_opts{quantum_variables(), 3, 3, 5, true, 0};
  RandomExpressionOptions c_opts{classical_variables(), 3, 3, 5, true, 0};
  ReductionReport out;
  for (int t = 0; t < trials; ++t) {
    auto u_q = random_expression(rng, q_opts);
    auto v_q = random_expression(rng, q_opts);
    auto u_c = random_expression(rng, c_opts);
    auto v_c = random_expression(rng, c_opts);
    auto v = v_q * v_c;
    keep_first_failure(out.quantum_classical,
                       ResidualReport::of(hybrid_bracket(u_q, v_c, spec), {u_q, v_c}));
    keep_first_failure(out.quantum_any,
                       ResidualReport::of(hybrid_bracket(u_q, v, spec) -
                                              v_c * quantum_bracket(u_q, v_q, spec),
                                          {u_q, v_q, v_c}));
    keep_first_failure(out.classical_any,
                       ResidualReport::of(hybrid_bracket(u_c, v, spec) -
                                              v_q * poisson(u_c, v_c, PoissonSectors::C),
                                          {u_c, v_q, v_c}));
  }
  return out;
}

ResidualReport acond_residual(const Expression& u, const Expression& v, const Expression& w,
                              const ProductSpec& spec) {
  auto g = [&](const Expression& x, const Expression& y) { return g_product(x, y, spec); };
  auto r = g(u * v, w) + g(u, v) * w - g(u, v * w) - u * g(v, w);
  return ResidualReport::of(std::move(r), {u, v, w});
}

ResidualReport sigma_assoc_residual(const Expression& u, const Expression& v, const Expression& w,
                                    const SigmaSpec& s) {
  auto P = [](const Expression& x, const Expression& y) {
    return poisson(x, y, PoissonSectors::C);
  };
  auto S = [&](const Expression& x, const Expression& y) { return sigma_product(x, y, s); };
  auto r = P(P(u, v), w) - P(u, P(v, w)) + S(S(u, v), w) - S(u, S(v, w)) + S(P(u, v), w) -
           P(u, S(v, w)) + P(S(u, v), w) - S(u, P(v, w));
  return ResidualReport::of(std::move(r), {u, v, w});
}

// ------------------------------------------------------------ no-go scan

WitnessNotFound::WitnessNotFound(SigmaSpec sigma)
    : Error("no associator witness found for sigma = (" + to_string(sigma.a) + ", " +
            to_string(sigma.b) + ", " + to_string(sigma.c) + ")"),
      sigma_(std::move(sigma)) {}

std::vector<SigmaSpec> default_sigma_grid() {
  std::vector<SigmaSpec> grid;
  for (long a = -1; a <= 1; ++a)
    for (long b = -1; b <= 1; ++b)
      for (long c = -1; c <= 1; ++c) grid.push_back({a, b, c});
  return grid;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("HQC_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs f(i) for i in [0, n) on a small pool; the first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::optional<NogoWitness> random_witness(const SigmaSpec& s, int trial_degree, int trials,
                                          std::uint64_t seed) {
  Rng rng(seed);
  auto vars = classical_variables();
  for (int t = 0; t < trials; ++t) {
    auto u = random_monomial(rng, vars, trial_degree);
    auto v = random_monomial(rng, vars, trial_degree);
    auto w = random_monomial(rng, vars, trial_degree);
    auto a = associator(u, v, w, ProductKind::composition, ProductSpec(s));
    if (!a.is_zero()) return NogoWitness{s, u, v, w, a};
  }
  return std::nullopt;
}

}  // namespace

std::vector<NogoWitness> nogo_scan(const std::vector<SigmaSpec>& grid, int trial_degree,
                                   int trials, std::uint64_t seed, unsigned threads) {
  if (trial_degree < 3) throw InputError("nogo_scan: trial_degree must be at least 3");
  if (trials < 1) throw InputError("nogo_scan: trials must be positive");
  std::vector<std::optional<NogoWitness>> found(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    // Independent stream per grid point so the result does not depend on scheduling.
    std::uint64_t stream = seed ^ (0x9E3779B97F4A7C15ull * (i + 1));
    found[i] = random_witness(grid[i], trial_degree, trials, stream);
  });
  std::vector<NogoWitness> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!found[i]) throw WitnessNotFound(grid[i]);
    out.push_back(std::move(*found[i]));
  }
  return out;
}

std::optional<NogoWitness> exhaustive_witness(const SigmaSpec& s, int max_degree) {
  if (max_degree < 1) throw InputError("exhaustive_witness: max_degree must be positive");
  std::vector<Expression> monomials;
  for (int d = 1; d <= max_degree; ++d)
    for (int k = d; k >= 0; --k)
      monomials.push_back(pow(Expression(VariableId::qC()), k) *
                          pow(Expression(VariableId::pC()), d - k));
  ProductSpec spec(s);
  for (const auto& u : monomials)
    for (const auto& v : monomials)
      for (const auto& w : monomials) {
        auto a = associator(u, v, w, ProductKind::composition, spec);
        if (!a.is_zero()) return NogoWitness{s, u, v, w, a};
      }
  return std::nullopt;
}

// ------------------------------------------------------- subalgebras

ClosureEscape::ClosureEscape(Expression x, Expression y)
    : Error("product of " + format(x) + " and " + format(y) + " leaves the generated span"),
      x_(std::move(x)),
      y_(std::move(y)) {}

namespace {

// Row-echelon basis over Gaussian rationals, one coordinate per stored term.
class SpanBasis {
 public:
  // Returns false if v was already in the span.
  bool add(Expression v) {
    reduce(v);
    if (v.is_zero()) return false;
    auto [key, lead] = *v.terms().begin();
    v *= Coefficient(1) / lead;
    rows_.push_back({key, std::move(v)});
    return true;
  }

  bool contains(Expression v) const {
    reduce(v);
    return v.is_zero();
  }

 private:
  void reduce(Expression& v) const {
    for (const auto& [pivot, row] : rows_) {
      auto c = v.coefficient(pivot.monomial, pivot.hbar_power);
      if (!c.is_zero()) v -= row * c;
    }
  }

  std::vector<std::pair<TermKey, Expression>> rows_;
};

}  // namespace

bool in_span(const std::vector<Expression>& basis, const Expression& target) {
  SpanBasis span;
  for (const auto& b : basis) span.add(b);
  return span.contains(target);
}

SubalgebraCert certify_subalgebra(const std::vector<Expression>& generators, const SigmaSpec& s,
                                  int max_degree) {
  if (max_degree < 1) throw InputError("certify_subalgebra: max_degree must be positive");
  for (const auto& g : generators)
    if (g.involves(Sector::Q) || g.max_hbar_power() > 0)
      throw InputError("certify_subalgebra: generator " + format(g) +
                       " is not an hbar-free classical expression");

  SubalgebraCert cert;
  cert.generators = generators;
  cert.sigma = s;
  cert.max_degree = max_degree;

  // Words as multisets of generator indices, shortest first.
  struct Word {
    Expression value;
    int length;
    std::size_t last;
  };
  std::vector<Word> words{{Expression(1), 0, 0}};
  for (std::size_t begin = 0, len = 1; len <= static_cast<std::size_t>(max_degree); ++len) {
    std::size_t end = words.size();
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t g = (len == 1 ? 0 : words[i].last); g < generators.size(); ++g)
        words.push_back({words[i].value * generators[g], static_cast<int>(len), g});
    begin = end;
  }
  std::vector<int> lengths;
  for (auto& w : words) {
    if (std::find(cert.basis.begin(), cert.basis.end(), w.value) != cert.basis.end()) continue;
    cert.basis.push_back(w.value);
    lengths.push_back(w.length);
  }

  ProductSpec spec(s);
  const auto& B = cert.basis;
  for (const auto& u : B) {
    if (u.is_constant()) continue;
    for (const auto& v : B) {
      if (v.is_constant()) continue;
      for (const auto& w : B) {
        if (w.is_constant()) continue;
        auto a = associator(u, v, w, ProductKind::composition, spec);
        if (!a.is_zero()) {
          cert.verdict = SubalgebraCert::Verdict::refuted;
          cert.witness = {u, v, w};
          cert.witness_associator = std::move(a);
          return cert;
        }
      }
    }
  }

  SpanBasis span;
  for (const auto& b : B) span.add(b);
  for (std::size_t i = 0; i < B.size(); ++i)
    for (std::size_t j = 0; j < B.size(); ++j) {
      if (lengths[i] + lengths[j] > max_degree) continue;
      auto prod = ast_product(B[i], B[j], spec);
      for (std::uint32_t h = 0; h <= prod.max_hbar_power(); ++h)
        if (!span.contains(prod.hbar_component(h))) throw ClosureEscape(B[i], B[j]);
    }
  return cert;
}

// ----------------------------------------------------- minimal subalgebra

MembershipReport minimal_membership(const Expression& kappa, const SigmaSpec& s,
                                    std::uint64_t seed, int trials, int max_degree) {
  if (kappa.involves(Sector::Q))
    throw InputError("minimal_membership: kappa " + format(kappa) + " is not classical");
  MembershipReport out;
  out.condition = ResidualReport::of(sigma_product(kappa, kappa, s), {kappa});

  std::vector<Expression> powers{Expression(1)};
  for (int k = 1; k <= max_degree; ++k) powers.push_back(powers.back() * kappa);
  Rng rng(seed);
  auto random_function = [&] {
    Expression f;
    for (const auto& p : powers) {
      long c = static_cast<long>(uniform_below(rng, 11)) - 5;
      if (c != 0) f += p * Coefficient(c);
    }
    return f;
  };
  ProductSpec spec(s);
  for (int t = 0; t < trials; ++t) {
    auto f1 = random_function();
    auto f2 = random_function();
    keep_first_failure(out.functional,
                       ResidualReport::of(ast_product(f1, f2, spec) - f1 * f2, {f1, f2}));
  }
  return out;
}

namespace {

void require_same_radicand(const QuadraticNumber& x, const QuadraticNumber& y) {
  if (!x.surd.is_zero() && !y.surd.is_zero() && !(x.radicand == y.radicand))
    throw std::logic_error("QuadraticNumber: mismatched radicands");
}

const Coefficient& radicand_of(const QuadraticNumber& x, const QuadraticNumber& y) {
  return x.surd.is_zero() ? y.radicand : x.radicand;
}

}  // namespace

QuadraticNumber QuadraticNumber::operator+(const QuadraticNumber& o) const {
  require_same_radicand(*this, o);
  return {rational + o.rational, surd + o.surd, radicand_of(*this, o)};
}

QuadraticNumber QuadraticNumber::operator*(const QuadraticNumber& o) const {
  require_same_radicand(*this, o);
  const auto& d = radicand_of(*this, o);
  return {rational * o.rational + surd * o.surd * d, rational * o.surd + surd * o.rational, d};
}

std::optional<Expression> LinearKappa::expression() const {
  if (!p_coefficient.is_rational()) return std::nullopt;
  return Expression(VariableId::qC()) + Expression(VariableId::pC()) * p_coefficient.rational;
}

std::vector<LinearKappa> kappa_linear(const SigmaSpec& s) {
  if (s.b.is_zero())
    throw DegenerateScheme("kappa_linear: b = 0, the linear solution q_C + k p_C does not exist");
  Coefficient disc = s.c * s.c - s.a * s.b;
  Coefficient root;
  std::vector<QuadraticNumber> ks;
  if (gaussian_sqrt(disc, root)) {
    ks.push_back({(-s.c + root) / s.b, 0, 0});
    ks.push_back({(-s.c - root) / s.b, 0, 0});
  } else {
    ks.push_back({-s.c / s.b, Coefficient(1) / s.b, disc});
    ks.push_back({-s.c / s.b, Coefficient(-1) / s.b, disc});
  }
  std::vector<LinearKappa> out;
  for (auto& k : ks) {
    QuadraticNumber b{s.b, 0, 0}, two_c{s.c * Coefficient(2), 0, 0}, a{s.a, 0, 0};
    LinearKappa kappa{k, b * k * k + two_c * k + a};
    if (!kappa.condition_residual.is_zero())
      throw std::logic_error("kappa_linear: solution fails the membership condition");
    if (auto e = kappa.expression(); e && !minimal_membership(*e, s).member())
      throw std::logic_error("kappa_linear: solution fails minimal_membership");
    out.push_back(std::move(kappa));
  }
  return out;
}

std::string to_string(const QuadraticNumber& x) {
  if (x.is_rational()) return to_string(x.rational);
  std::string surd = to_string(x.surd) + "*sqrt(" + to_string(x.radicand) + ")";
  if (x.rational.is_zero()) return surd;
  return to_string(x.rational) + " + " + surd;
}

}  // namespace hqc
