#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hqc/expr.hpp"

namespace hqc {

using Rng = std::mt19937_64;

/// Uniform integer in [0, n); plain modulo keeps streams identical across
/// standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) { return rng() % n; }

struct RandomExpressionOptions {
  std::vector<VariableId> variables;
  int max_degree = 4;
  int max_terms = 4;
  int coefficient_range = 5;  ///< numerators drawn from [-range, range]
  bool complex_coefficients = false;
  int max_hbar_power = 0;
};

/// Random polynomial with small Gaussian-rational coefficients.
Expression random_expression(Rng& rng, const RandomExpressionOptions& options);

/// Random monomial (coefficient 1) of total degree in [1, max_degree].
Expression random_monomial(Rng& rng, const std::vector<VariableId>& variables, int max_degree);

/// One canonical pair per sector, the default phase space.
std::vector<VariableId> quantum_variables(std::uint32_t dofs = 1);
std::vector<VariableId> classical_variables(std::uint32_t dofs = 1);
std::vector<VariableId> all_variables(std::uint32_t dofs = 1);

}  // namespace hqc
