#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hqc/linalg.hpp"
#include "hqc/products.hpp"

namespace hqc {

class NonlinearSystem : public Error {
 public:
  using Error::Error;
};

class DegreeBlowup : public Error {
 public:
  using Error::Error;
};

class StepRejected : public Error {
 public:
  using Error::Error;
};

class NotConserved : public Error {
 public:
  using Error::Error;
};

/// H = H_Q + H_C + H_I with no explicit time dependence.
class HybridSystem {
 public:
  /// Throws InputError if h_q involves classical or h_c quantum variables.
  HybridSystem(Expression h_q, Expression h_c, Expression h_i, ProductSpec spec = {});

  const Expression& h_q() const { return h_q_; }
  const Expression& h_c() const { return h_c_; }
  const Expression& h_i() const { return h_i_; }
  const ProductSpec& spec() const { return spec_; }
  Expression hamiltonian() const { return h_q_ + h_c_ + h_i_; }

  /// False when the classical factors of h_i do not span a certified
  /// ⊛-subalgebra; pure variables still evolve consistently.
  bool consistent_hybrid() const { return consistent_; }

  /// Both members of every canonical pair that appears in H, in variable order.
  std::vector<VariableId> canonical_variables() const;

 private:
  Expression h_q_, h_c_, h_i_;
  ProductSpec spec_;
  bool consistent_ = true;
};

/// Gaussian product state ρ_Q·ρ_C over a list of canonical variables.
struct GaussianState {
  std::vector<VariableId> variables;
  std::vector<double> mean;
  Matrix cov;
  double hbar = 1.0;
  /// Non-fatal findings, e.g. a Q pair below the uncertainty bound.
  std::vector<std::string> warnings;

  /// Validates shape, symmetry, PSD and the zero cross-sector blocks
  /// (InputError); records uncertainty-bound violations as warnings.
  static GaussianState make(std::vector<VariableId> variables, std::vector<double> mean,
                            Matrix cov, double hbar);
  std::size_t index_of(VariableId v) const;  ///< InputError if absent
};

/// {[f, H]}.
Expression eom(const Expression& f, const HybridSystem& sys);

struct Linearization {
  std::vector<VariableId> variables;
  std::vector<std::vector<Coefficient>> m;  ///< ż = m z + b
  std::vector<Coefficient> b;
};

/// Exact affine equations of motion. Throws NonlinearSystem if an equation
/// has degree ≥ 2 or depends on hbar, InputError for complex coefficients.
Linearization linearize(const HybridSystem& sys, const std::vector<VariableId>& variables);
Linearization linearize(const HybridSystem& sys);

enum class Method { matrix_exponential, rk4, taylor };

std::string to_string(Method m);
Method method_from_string(const std::string& name);  ///< InputError if unknown

struct PropagationOptions {
  double squaring_threshold = 0.5;
  double rk4_dt = 1e-3;
  int taylor_order = 8;
  int degree_cap = 12;
  double taylor_dt = 1e-2;
  /// Largest admissible ratio of the last Taylor term to the step result.
  double step_tolerance = 1e-10;
  /// Evolved directly (not by substitution) under the taylor method.
  std::vector<Expression> observables;
};

struct Trajectory {
  Method method = Method::matrix_exponential;
  std::vector<VariableId> variables;
  std::vector<double> times;
  /// evolved[t][k]: variable k at times[t] as a polynomial in the initial variables.
  std::vector<std::vector<Expression>> evolved;
  /// Linear methods: z(t) = maps[t]·z(0) + offsets[t].
  std::vector<Matrix> maps;
  std::vector<std::vector<double>> offsets;
  /// Taylor method: options.observables evolved per time point.
  std::vector<Expression> observables;
  std::vector<std::vector<Expression>> evolved_observables;

  std::size_t time_index(double t) const;  ///< InputError if t is not on the grid
};

/// Evolves the canonical variables (H's variables plus `extra`) over an
/// increasing time grid; times[0] is the initial time.
Trajectory propagate(const HybridSystem& sys, const std::vector<double>& times, Method method,
                     const PropagationOptions& options = {},
                     const std::vector<VariableId>& extra = {});

/// Gaussian moment of a polynomial via the Isserlis recursion with mean shift;
/// hbar is bound to state.hbar.
std::complex<double> gaussian_expectation(const Expression& poly, const GaussianState& state);

/// ⟨obs⟩ at times[time_index]. Observables tracked by the taylor method use
/// their evolved form; otherwise the evolved variables are substituted.
std::complex<double> expectation(const Expression& obs, const Trajectory& traj,
                                 const GaussianState& state, std::size_t time_index);

struct CanonicalAudit {
  double time = 0.0;
  /// max |{[z_k(t), z_l(t)]} − J_kl| over all pairs.
  double hybrid_max_abs_dev = 0.0;
  /// Poisson bracket over classical pairs only.
  double poisson_max_abs_dev = 0.0;
  /// Moyal bracket over quantum pairs only.
  double moyal_max_abs_dev = 0.0;
};

CanonicalAudit canonical_audit(const Trajectory& traj, const HybridSystem& sys,
                               std::size_t time_index);

struct ConservationReport {
  std::vector<double> times;
  std::vector<std::complex<double>> values;  ///< ⟨v_q·v_c⟩(t)
  double max_abs_drift = 0.0;
  bool conserved = false;
};

/// Throws NotConserved unless {[v_q, H]} = {[v_c, H]} = 0 exactly.
ConservationReport conserved_product_check(const HybridSystem& sys, const Expression& v_q,
                                           const Expression& v_c, const Trajectory& traj,
                                           const GaussianState& state, double tolerance = 1e-8);

struct BackreactionReport {
  std::vector<double> times;
  std::vector<VariableId> classical;
  /// Per time: classical means and covariance, coupled and with h_i = 0.
  std::vector<std::vector<double>> means, baseline_means;
  std::vector<Matrix> covariances, baseline_covariances;
  std::vector<std::complex<double>> h_q, h_c, h_i, energy;
  /// d⟨H_I⟩/dt by finite differences and as ⟨{[H_I, H]}⟩.
  std::vector<std::complex<double>> h_i_rate_numeric, h_i_rate_bracket;
  double max_mean_deviation = 0.0;
  double max_covariance_deviation = 0.0;
  double energy_drift = 0.0;
};

BackreactionReport backreaction_report(const HybridSystem& sys, const GaussianState& state,
                                       const std::vector<double>& times,
                                       Method method = Method::matrix_exponential,
                                       const PropagationOptions& options = {});

}  // namespace hqc
