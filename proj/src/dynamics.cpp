#include "hqc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "hqc/consistency.hpp"
#include "hqc/text.hpp"

namespace hqc {

namespace {

bool involves_only(const Expression& e, Sector s) {
  return !e.involves(s == Sector::Q ? Sector::C : Sector::Q);
}

double max_abs_coefficient(const Expression& e) {
  double best = 0.0;
  for (const auto& [key, c] : e.terms()) best = std::max(best, std::abs(c.to_complex()));
  return best;
}

// Coefficients rounded to the nearest double and re-embedded exactly.
Expression round_coefficients(const Expression& e) {
  Expression out;
  for (const auto& [key, c] : e.terms()) {
    auto z = c.to_complex();
    out.add_term(key.monomial, key.hbar_power, Coefficient::from_double(z.real(), z.imag()));
  }
  return out;
}

int symplectic(VariableId a, VariableId b) {
  if (a.sector != b.sector || a.index != b.index || a.kind == b.kind) return 0;
  return a.kind == Kind::position ? 1 : -1;
}

}  // namespace

// ------------------------------------------------------------ system

HybridSystem::HybridSystem(Expression h_q, Expression h_c, Expression h_i, ProductSpec spec)
    : h_q_(std::move(h_q)), h_c_(std::move(h_c)), h_i_(std::move(h_i)), spec_(std::move(spec)) {
  if (h_q_.involves(Sector::C))
    throw InputError("h_q must not contain classical variables: " + format(h_q_));
  if (h_c_.involves(Sector::Q))
    throw InputError("h_c must not contain quantum variables: " + format(h_c_));
  std::vector<Expression> factors;
  for (auto& pair : sector_decompose(h_i_))
    if (!pair.classical.is_constant()) factors.push_back(pair.classical);
  if (!factors.empty()) {
    try {
      consistent_ = certify_subalgebra(factors, spec_.sigma_c(), 1).certified();
    } catch (const ClosureEscape&) {
      consistent_ = false;
    }
  }
}

std::vector<VariableId> HybridSystem::canonical_variables() const {
  std::set<VariableId> vars;
  for (auto v : hamiltonian().variables()) {
    vars.insert(v);
    vars.insert(v.conjugate());
  }
  return {vars.begin(), vars.end()};
}

GaussianState GaussianState::make(std::vector<VariableId> variables, std::vector<double> mean,
                                  Matrix cov, double hbar) {
  const std::size_t n = variables.size();
  if (mean.size() != n) throw InputError("state: mean has wrong length");
  if (cov.rows() != n || cov.cols() != n) throw InputError("state: covariance has wrong shape");
  if (std::set<VariableId>(variables.begin(), variables.end()).size() != n)
    throw InputError("state: duplicate variable");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InputError("state: hbar must be positive");
  for (double x : mean)
    if (!std::isfinite(x)) throw InputError("state: mean must be finite");
  for (double x : cov.data())
    if (!std::isfinite(x)) throw InputError("state: covariance must be finite");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (variables[i].sector != variables[j].sector && cov(i, j) != 0.0)
        throw InputError("state: covariance couples " + variable_name(variables[i]) + " and " +
                         variable_name(variables[j]) + " across sectors");
  if (!is_positive_semidefinite(cov))
    throw InputError("state: covariance is not symmetric positive semidefinite");

  GaussianState s{std::move(variables), std::move(mean), std::move(cov), hbar, {}};
  for (std::size_t i = 0; i < n; ++i) {
    auto v = s.variables[i];
    if (v.sector != Sector::Q || v.kind != Kind::position) continue;
    auto it = std::find(s.variables.begin(), s.variables.end(), v.conjugate());
    if (it == s.variables.end()) continue;
    std::size_t j = static_cast<std::size_t>(it - s.variables.begin());
    double det = s.cov(i, i) * s.cov(j, j) - s.cov(i, j) * s.cov(j, i);
    if (det < hbar * hbar / 4 * (1 - 1e-12))
      s.warnings.push_back("quantum pair " + variable_name(v) + "/" +
                           variable_name(v.conjugate()) +
                           " violates the uncertainty bound; the Wigner function is not a valid "
                           "quantum state");
  }
  return s;
}

std::size_t GaussianState::index_of(VariableId v) const {
  auto it = std::find(variables.begin(), variables.end(), v);
  if (it == variables.end())
    throw InputError("state does not define variable " + variable_name(v));
  return static_cast<std::size_t>(it - variables.begin());
}

// ------------------------------------------------------- equations of motion

Expression eom(const Expression& f, const HybridSystem& sys) {
  auto result = hybrid_bracket(f, sys.hamiltonian(), sys.spec());
  if (f.is_constant()) return result;
  if (involves_only(f, Sector::Q)) {
    if (!(result == quantum_bracket(f, sys.h_q() + sys.h_i(), sys.spec())))
      throw std::logic_error("eom: quantum reduction failed for " + format(f));
  } else if (involves_only(f, Sector::C)) {
    if (!(result == poisson(f, sys.h_c() + sys.h_i(), PoissonSectors::C)))
      throw std::logic_error("eom: classical reduction failed for " + format(f));
  }
  return result;
}

Linearization linearize(const HybridSystem& sys, const std::vector<VariableId>& variables) {
  Linearization lin;
  lin.variables = variables;
  const std::size_t n = variables.size();
  lin.m.assign(n, std::vector<Coefficient>(n));
  lin.b.assign(n, Coefficient());
  for (std::size_t k = 0; k < n; ++k) {
    auto rate = eom(Expression(variables[k]), sys);
    const auto name = variable_name(variables[k]);
    if (rate.max_hbar_power() > 0)
      throw NonlinearSystem("equation of motion of " + name + " depends on hbar");
    if (rate.degree() >= 2)
      throw NonlinearSystem("equation of motion of " + name + " is nonlinear: " + format(rate));
    for (const auto& [key, c] : rate.terms()) {
      if (!c.is_real()) throw InputError("equation of motion of " + name + " is not real");
      if (key.monomial.is_one()) {
        lin.b[k] = c;
        continue;
      }
      auto v = key.monomial.factors()[0].first;
      auto it = std::find(variables.begin(), variables.end(), v);
      if (it == variables.end())
        throw InputError("equation of motion of " + name + " involves " + variable_name(v) +
                         ", which is not among the propagated variables");
      lin.m[k][static_cast<std::size_t>(it - variables.begin())] = c;
    }
  }
  return lin;
}

Linearization linearize(const HybridSystem& sys) {
  return linearize(sys, sys.canonical_variables());
}

std::string to_string(Method m) {
  switch (m) {
    case Method::matrix_exponential: return "matrix_exponential";
    case Method::rk4: return "rk4";
    case Method::taylor: return "taylor";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "matrix_exponential") return Method::matrix_exponential;
  if (name == "rk4") return Method::rk4;
  if (name == "taylor") return Method::taylor;
  throw InputError("unknown method '" + name + "' (expected matrix_exponential, rk4 or taylor)");
}

// ------------------------------------------------------------ propagation

std::size_t Trajectory::time_index(double t) const {
  auto it = std::find(times.begin(), times.end(), t);
  if (it == times.end()) throw InputError("time " + std::to_string(t) + " is not on the grid");
  return static_cast<std::size_t>(it - times.begin());
}

namespace {

// [[M b], [0 0]] as doubles.
Matrix augmented(const Linearization& lin) {
  const std::size_t n = lin.variables.size();
  Matrix a(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = lin.m[i][j].to_complex().real();
    a(i, n) = lin.b[i].to_complex().real();
  }
  return a;
}

// e^{A t}, one block per coupled group so decoupled sectors see identical arithmetic.
Matrix blockwise_expm(const Matrix& a, double t, double threshold) {
  const std::size_t n = a.rows();
  Matrix out(n, n);
  for (const auto& group : connected_components(a)) {
    Matrix sub(group.size(), group.size());
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = 0; j < group.size(); ++j) sub(i, j) = t * a(group[i], group[j]);
    auto e = expm(sub, threshold);
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = 0; j < group.size(); ++j) out(group[i], group[j]) = e(i, j);
  }
  return out;
}

Matrix rk4_step(const Matrix& a, const Matrix& phi, double h) {
  auto k1 = a * phi;
  auto k2 = a * (phi + (h / 2) * k1);
  auto k3 = a * (phi + (h / 2) * k2);
  auto k4 = a * (phi + h * k3);
  return phi + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::size_t substeps(double span, double dt) {
  if (span <= 0.0) return 0;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
}

void record_affine(Trajectory& traj, const Matrix& phi) {
  const std::size_t n = traj.variables.size();
  Matrix map(n, n);
  std::vector<double> offset(n);
  std::vector<Expression> evolved(n);
  for (std::size_t i = 0; i < n; ++i) {
    Expression e = Coefficient::from_double(phi(i, n));
    offset[i] = phi(i, n);
    for (std::size_t j = 0; j < n; ++j) {
      map(i, j) = phi(i, j);
      if (phi(i, j) != 0.0) e += Expression(traj.variables[j]) * Coefficient::from_double(phi(i, j));
    }
    evolved[i] = std::move(e);
  }
  traj.maps.push_back(std::move(map));
  traj.offsets.push_back(std::move(offset));
  traj.evolved.push_back(std::move(evolved));
}

// L = {[·, H]} applied term by term; L is linear and hbar rides along, so
// brackets are cached per monomial.
class Liouvillian {
 public:
  explicit Liouvillian(const HybridSystem& sys) : sys_(sys), h_(sys.hamiltonian()) {}

  Expression operator()(const Expression& f) {
    Expression out;
    for (const auto& [key, c] : f.terms()) {
      auto it = cache_.find(key.monomial);
      if (it == cache_.end())
        it = cache_.emplace(key.monomial,
                            hybrid_bracket(Expression::term(1, key.monomial), h_, sys_.spec()))
                 .first;
      out += it->second.times_hbar(key.hbar_power) * c;
    }
    return out;
  }

 private:
  const HybridSystem& sys_;
  Expression h_;
  std::map<Monomial, Expression> cache_;
};

Expression taylor_step(const Expression& f, Liouvillian& L, double h,
                       const PropagationOptions& options) {
  const Coefficient step = Coefficient::from_double(h);
  Expression sum = f;
  Expression term = f;
  for (int n = 1; n <= options.taylor_order; ++n) {
    term = L(term) * (step / Coefficient(n));
    sum += term;
    if (sum.degree() > options.degree_cap)
      throw DegreeBlowup("taylor: observable degree " + std::to_string(sum.degree()) +
                         " exceeds the cap of " + std::to_string(options.degree_cap));
  }
  const double last = max_abs_coefficient(term);
  const double size = std::max(max_abs_coefficient(sum), 1e-300);
  if (last > options.step_tolerance * size)
    throw StepRejected("taylor: last series term is " + std::to_string(last / size) +
                       " of the step result, above the tolerance " +
                       std::to_string(options.step_tolerance));
  return round_coefficients(sum);
}

}  // namespace

Trajectory propagate(const HybridSystem& sys, const std::vector<double>& times, Method method,
                     const PropagationOptions& options, const std::vector<VariableId>& extra) {
  if (times.empty()) throw InputError("propagate: empty time grid");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw InputError("propagate: time grid must be finite");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InputError("propagate: time grid must be strictly increasing");
  }
  std::set<VariableId> vars;
  for (auto v : sys.canonical_variables()) vars.insert(v);
  for (auto v : extra) {
    vars.insert(v);
    vars.insert(v.conjugate());
  }

  Trajectory traj;
  traj.method = method;
  traj.variables.assign(vars.begin(), vars.end());
  traj.times = times;
  const std::size_t n = traj.variables.size();

  switch (method) {
    case Method::matrix_exponential: {
      auto a = augmented(linearize(sys, traj.variables));
      for (double t : times) record_affine(traj, blockwise_expm(a, t - times[0], options.squaring_threshold));
      break;
    }
    case Method::rk4: {
      if (!(options.rk4_dt > 0.0)) throw InputError("propagate: rk4_dt must be positive");
      auto a = augmented(linearize(sys, traj.variables));
      Matrix phi = Matrix::identity(n + 1);
      record_affine(traj, phi);
      for (std::size_t k = 1; k < times.size(); ++k) {
        const double span = times[k] - times[k - 1];
        const std::size_t steps = substeps(span, options.rk4_dt);
        const double h = span / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s) phi = rk4_step(a, phi, h);
        record_affine(traj, phi);
      }
      break;
    }
    case Method::taylor: {
      if (options.taylor_order < 1) throw InputError("propagate: taylor_order must be positive");
      if (!(options.taylor_dt > 0.0)) throw InputError("propagate: taylor_dt must be positive");
      std::vector<Expression> tracked;
      for (auto v : traj.variables) tracked.emplace_back(v);
      for (const auto& obs : options.observables) tracked.push_back(obs);
      traj.observables = options.observables;
      auto record = [&] {
        traj.evolved.emplace_back(tracked.begin(), tracked.begin() + static_cast<long>(n));
        traj.evolved_observables.emplace_back(tracked.begin() + static_cast<long>(n), tracked.end());
      };
      record();
      Liouvillian L(sys);
      for (std::size_t k = 1; k < times.size(); ++k) {
        const double span = times[k] - times[k - 1];
        const std::size_t steps = substeps(span, options.taylor_dt);
        const double h = span / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s)
          for (auto& f : tracked) f = taylor_step(f, L, h, options);
        record();
      }
      break;
    }
  }
  return traj;
}

// ------------------------------------------------------------ expectations

namespace {

using Exponents = std::vector<int>;

class MomentTable {
 public:
  explicit MomentTable(const Matrix& cov) : cov_(cov) {}

  // E[∏ x_i^{k_i}] for centered x with covariance cov, by E[x_i m] = Σ_j Σ_ij E[∂_j m].
  double moment(const Exponents& k) {
    int total = 0;
    for (int e : k) total += e;
    if (total == 0) return 1.0;
    if (total % 2 == 1) return 0.0;
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    std::size_t i = 0;
    while (k[i] == 0) ++i;
    Exponents rest = k;
    --rest[i];
    double sum = 0.0;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      if (rest[j] == 0 || cov_(i, j) == 0.0) continue;
      Exponents d = rest;
      --d[j];
      sum += cov_(i, j) * rest[j] * moment(d);
    }
    memo_.emplace(k, sum);
    return sum;
  }

 private:
  const Matrix& cov_;
  std::map<Exponents, double> memo_;
};

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace

std::complex<double> gaussian_expectation(const Expression& poly, const GaussianState& state) {
  const std::size_t n = state.variables.size();
  // Numeric polynomial in the state variables, hbar bound.
  std::map<Exponents, std::complex<double>> raw;
  for (const auto& [key, c] : poly.terms()) {
    Exponents k(n, 0);
    for (const auto& [v, e] : key.monomial.factors()) k[state.index_of(v)] = static_cast<int>(e);
    raw[k] += c.to_complex() * std::pow(state.hbar, static_cast<double>(key.hbar_power));
  }
  // Shift to central variables: z = μ + x.
  std::map<Exponents, std::complex<double>> central;
  for (const auto& [k, c] : raw) {
    Exponents x(n, 0);
    auto expand = [&](auto&& self, std::size_t i, std::complex<double> acc) -> void {
      if (i == n) {
        central[x] += acc;
        return;
      }
      for (int j = 0; j <= k[i]; ++j) {
        x[i] = j;
        const double factor = binomial(k[i], j) * std::pow(state.mean[i], k[i] - j);
        if (factor != 0.0) self(self, i + 1, acc * factor);
      }
      x[i] = 0;
    };
    expand(expand, 0, c);
  }
  MomentTable table(state.cov);
  std::complex<double> sum = 0.0;
  for (const auto& [k, c] : central) sum += c * table.moment(k);
  return sum;
}

std::complex<double> expectation(const Expression& obs, const Trajectory& traj,
                                 const GaussianState& state, std::size_t time_index) {
  if (time_index >= traj.times.size()) throw InputError("expectation: time index out of range");
  for (std::size_t k = 0; k < traj.observables.size(); ++k)
    if (traj.observables[k] == obs)
      return gaussian_expectation(traj.evolved_observables[time_index][k], state);
  std::map<VariableId, Expression> map;
  for (std::size_t k = 0; k < traj.variables.size(); ++k)
    map.emplace(traj.variables[k], traj.evolved[time_index][k]);
  return gaussian_expectation(substitute(obs, map, SubstitutionMode::identity_for_unmapped), state);
}

// ------------------------------------------------------------ audits

CanonicalAudit canonical_audit(const Trajectory& traj, const HybridSystem& sys,
                               std::size_t time_index) {
  if (time_index >= traj.times.size()) throw InputError("canonical_audit: time index out of range");
  CanonicalAudit audit;
  audit.time = traj.times[time_index];
  const auto& z = traj.evolved[time_index];
  const auto& vars = traj.variables;
  for (std::size_t k = 0; k < vars.size(); ++k)
    for (std::size_t l = 0; l < vars.size(); ++l) {
      const Expression delta = Expression(static_cast<long>(symplectic(vars[k], vars[l])));
      audit.hybrid_max_abs_dev = std::max(
          audit.hybrid_max_abs_dev, max_abs_coefficient(hybrid_bracket(z[k], z[l], sys.spec()) - delta));
      if (vars[k].sector != vars[l].sector) continue;
      if (vars[k].sector == Sector::C)
        audit.poisson_max_abs_dev =
            std::max(audit.poisson_max_abs_dev,
                     max_abs_coefficient(poisson(z[k], z[l], PoissonSectors::C) - delta));
      else
        audit.moyal_max_abs_dev =
            std::max(audit.moyal_max_abs_dev,
                     max_abs_coefficient(quantum_bracket(z[k], z[l], sys.spec()) - delta));
    }
  return audit;
}

ConservationReport conserved_product_check(const HybridSystem& sys, const Expression& v_q,
                                           const Expression& v_c, const Trajectory& traj,
                                           const GaussianState& state, double tolerance) {
  const auto H = sys.hamiltonian();
  for (const auto* v : {&v_q, &v_c}) {
    auto rate = hybrid_bracket(*v, H, sys.spec());
    if (!rate.is_zero())
      throw NotConserved(format(*v) + " is not conserved: its bracket with H is " + format(rate));
  }
  ConservationReport report;
  report.times = traj.times;
  const auto product = v_q * v_c;
  for (std::size_t t = 0; t < traj.times.size(); ++t) {
    report.values.push_back(expectation(product, traj, state, t));
    report.max_abs_drift = std::max(report.max_abs_drift, std::abs(report.values.back() - report.values.front()));
  }
  report.conserved = report.max_abs_drift <= tolerance;
  return report;
}

BackreactionReport backreaction_report(const HybridSystem& sys, const GaussianState& state,
                                       const std::vector<double>& times, Method method,
                                       const PropagationOptions& options) {
  HybridSystem baseline(sys.h_q(), sys.h_c(), Expression(), sys.spec());
  const auto H = sys.hamiltonian();
  const auto rate = hybrid_bracket(sys.h_i(), H, sys.spec());
  auto all_vars = sys.canonical_variables();

  BackreactionReport report;
  report.times = times;
  for (auto v : all_vars)
    if (v.sector == Sector::C) report.classical.push_back(v);
  const std::size_t nc = report.classical.size();

  PropagationOptions opts = options;
  if (method == Method::taylor) {
    for (const auto& e : {sys.h_q(), sys.h_c(), sys.h_i(), H, rate}) opts.observables.push_back(e);
    for (std::size_t i = 0; i < nc; ++i)
      for (std::size_t j = i; j < nc; ++j)
        opts.observables.push_back(Expression(report.classical[i]) * Expression(report.classical[j]));
  }
  auto traj = propagate(sys, times, method, opts);
  auto base = propagate(baseline, times, method, opts, all_vars);

  auto moments = [&](const Trajectory& tr, std::size_t t, std::vector<double>& mean, Matrix& cov) {
    mean.assign(nc, 0.0);
    cov = Matrix(nc, nc);
    for (std::size_t i = 0; i < nc; ++i)
      mean[i] = expectation(Expression(report.classical[i]), tr, state, t).real();
    for (std::size_t i = 0; i < nc; ++i)
      for (std::size_t j = i; j < nc; ++j) {
        auto second = expectation(Expression(report.classical[i]) * Expression(report.classical[j]),
                                  tr, state, t).real();
        cov(i, j) = cov(j, i) = second - mean[i] * mean[j];
      }
  };

  for (std::size_t t = 0; t < times.size(); ++t) {
    std::vector<double> m, bm;
    Matrix c, bc;
    moments(traj, t, m, c);
    moments(base, t, bm, bc);
    for (std::size_t i = 0; i < nc; ++i) {
      report.max_mean_deviation = std::max(report.max_mean_deviation, std::abs(m[i] - bm[i]));
      for (std::size_t j = 0; j < nc; ++j)
        report.max_covariance_deviation =
            std::max(report.max_covariance_deviation, std::abs(c(i, j) - bc(i, j)));
    }
    report.means.push_back(std::move(m));
    report.baseline_means.push_back(std::move(bm));
    report.covariances.push_back(std::move(c));
    report.baseline_covariances.push_back(std::move(bc));
    report.h_q.push_back(expectation(sys.h_q(), traj, state, t));
    report.h_c.push_back(expectation(sys.h_c(), traj, state, t));
    report.h_i.push_back(expectation(sys.h_i(), traj, state, t));
    report.energy.push_back(expectation(H, traj, state, t));
    report.h_i_rate_bracket.push_back(expectation(rate, traj, state, t));
    report.energy_drift = std::max(report.energy_drift, std::abs(report.energy.back() - report.energy.front()));
  }
  const std::size_t n = times.size();
  for (std::size_t t = 0; t < n; ++t) {
    if (n < 2) {
      report.h_i_rate_numeric.push_back(0.0);
      continue;
    }
    std::size_t lo = t == 0 ? 0 : t - 1;
    std::size_t hi = t + 1 == n ? t : t + 1;
    report.h_i_rate_numeric.push_back((report.h_i[hi] - report.h_i[lo]) / (times[hi] - times[lo]));
  }
  return report;
}

}  // namespace hqc
