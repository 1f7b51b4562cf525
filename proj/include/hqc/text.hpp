#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hqc/errors.hpp"
#include "hqc/expr.hpp"

namespace hqc {

/// Grammar error with a 1-based source position and the tokens that would
/// have been accepted there.
class ParseError : public InputError {
 public:
  ParseError(int line, int column, std::vector<std::string> expected, const std::string& found);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

/// Parses the expression grammar:
///   variables  qQ<i> pQ<i> qC<i> pC<i>   (index optional, default 0)
///   symbols    hbar, i
///   literals   integers; `a/b` via division by a constant
///   operators  + - * / ^ (nonnegative integer exponents), parentheses
Expression parse(std::string_view source);

/// Parses an expression and requires it to be a plain constant.
Coefficient parse_constant(std::string_view source);

/// Canonical text; parse(format(e)) == e.
std::string format(const Expression& e);

std::string variable_name(VariableId v);

}  // namespace hqc
