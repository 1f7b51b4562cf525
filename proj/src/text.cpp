#include "hqc/text.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace hqc {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k > 0) out += ", ";
    out += items[k];
  }
  return out;
}

}  // namespace

ParseError::ParseError(int line, int column, std::vector<std::string> expected,
                       const std::string& found)
    : InputError(std::to_string(line) + ":" + std::to_string(column) + ": expected " +
                 join(expected) + " but found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

// ------------------------------------------------------------------ format

std::string variable_name(VariableId v) {
  std::string name;
  name += v.kind == Kind::position ? 'q' : 'p';
  name += v.sector == Sector::Q ? 'Q' : 'C';
  if (v.index != 0) name += std::to_string(v.index);
  return name;
}

namespace {

std::string factors_text(const TermKey& key) {
  std::vector<std::string> parts;
  if (key.hbar_power == 1) {
    parts.emplace_back("hbar");
  } else if (key.hbar_power > 1) {
    parts.push_back("hbar^" + std::to_string(key.hbar_power));
  }
  for (const auto& [v, e] : key.monomial.factors()) {
    std::string s = variable_name(v);
    if (e > 1) s += "^" + std::to_string(e);
    parts.push_back(std::move(s));
  }
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0) out += '*';
    out += parts[k];
  }
  return out;
}

std::string term_text(const TermKey& key, const Coefficient& c) {
  const std::string factors = factors_text(key);
  if (factors.empty()) return to_string(c);
  if (c.is_one()) return factors;
  if (c == Coefficient(-1)) return "-" + factors;
  return to_string(c) + "*" + factors;
}

}  // namespace

std::string format(const Expression& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [key, c] : e.terms()) {
    std::string t = term_text(key, c);
    if (first) {
      out = std::move(t);
      first = false;
    } else if (t.front() == '-') {
      out += " - ";
      out.append(t, 1, std::string::npos);
    } else {
      out += " + ";
      out += t;
    }
  }
  return out;
}

// ------------------------------------------------------------------- parse

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::end) return "end of input";
  return "'" + t.text + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::end, "", line_, col_});
        return out;
      }
      const int line = line_;
      const int col = col_;
      const char ch = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        std::string text;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          text += advance();
        out.push_back({Tok::number, text, line, col});
      } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::string text;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          text += advance();
        out.push_back({Tok::ident, text, line, col});
      } else {
        Tok kind;
        switch (ch) {
          case '+': kind = Tok::plus; break;
          case '-': kind = Tok::minus; break;
          case '*': kind = Tok::star; break;
          case '/': kind = Tok::slash; break;
          case '^': kind = Tok::caret; break;
          case '(': kind = Tok::lparen; break;
          case ')': kind = Tok::rparen; break;
          default:
            throw ParseError(line, col, {"number", "variable", "operator", "'('", "')'"},
                             std::string("'") + ch + "'");
        }
        advance();
        out.push_back({kind, std::string(1, ch), line, col});
      }
    }
  }

 private:
  char advance() {
    char ch = src_[pos_++];
    if (ch == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return ch;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

const std::vector<std::string> kOperand = {"number", "variable", "'hbar'", "'i'", "'('",
                                           "'-'", "'+'"};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Expression parse_all() {
    Expression e = expr();
    if (peek().kind != Tok::end)
      throw ParseError(peek().line, peek().column, {"'+'", "'-'", "'*'", "'/'", "'^'",
                                                    "end of input"},
                       describe(peek()));
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  Expression expr() {
    Expression e = term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const bool add = next().kind == Tok::plus;
      Expression rhs = term();
      if (add) {
        e += rhs;
      } else {
        e -= rhs;
      }
    }
    return e;
  }

  Expression term() {
    Expression e = unary();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
      const bool mul = next().kind == Tok::star;
      const Token& at = peek();
      Expression rhs = unary();
      if (mul) {
        e *= rhs;
      } else {
        if (!rhs.is_constant() || rhs.is_zero())
          throw ParseError(at.line, at.column, {"nonzero constant divisor"}, describe(at));
        e *= Coefficient(1) / rhs.terms().begin()->second;
      }
    }
    return e;
  }

  Expression unary() {
    if (peek().kind == Tok::minus) {
      next();
      return -unary();
    }
    if (peek().kind == Tok::plus) {
      next();
      return unary();
    }
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (peek().kind == Tok::caret) {
      next();
      const Token& t = peek();
      if (t.kind != Tok::number)
        throw ParseError(t.line, t.column, {"nonnegative integer exponent"}, describe(t));
      next();
      if (t.text.size() > 6)
        throw ParseError(t.line, t.column, {"exponent below 1000000"}, describe(t));
      return pow(base, static_cast<std::uint32_t>(std::stoul(t.text)));
    }
    return base;
  }

  Expression primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::number: {
        next();
        return Expression(Coefficient(mpq_class(mpz_class(t.text))));
      }
      case Tok::ident: {
        next();
        return identifier(t);
      }
      case Tok::lparen: {
        next();
        Expression e = expr();
        if (peek().kind != Tok::rparen)
          throw ParseError(peek().line, peek().column, {"')'", "operator"}, describe(peek()));
        next();
        return e;
      }
      default:
        throw ParseError(t.line, t.column, kOperand, describe(t));
    }
  }

  static Expression identifier(const Token& t) {
    const std::string& s = t.text;
    if (s == "hbar") return Expression::hbar();
    if (s == "i") return Expression(Coefficient::i());
    if (s.size() >= 2 && (s[0] == 'q' || s[0] == 'p') && (s[1] == 'Q' || s[1] == 'C')) {
      std::uint32_t index = 0;
      if (s.size() > 2) {
        const std::string digits = s.substr(2);
        const bool numeric = digits.size() <= 9 &&
                             std::all_of(digits.begin(), digits.end(), [](char c) {
                               return std::isdigit(static_cast<unsigned char>(c));
                             });
        if (!numeric) throw ParseError(t.line, t.column, {"variable", "'hbar'", "'i'"}, "'" + s + "'");
        index = static_cast<std::uint32_t>(std::stoul(digits));
      }
      return Expression(VariableId{s[1] == 'Q' ? Sector::Q : Sector::C,
                                   s[0] == 'q' ? Kind::position : Kind::momentum, index});
    }
    throw ParseError(t.line, t.column, {"variable", "'hbar'", "'i'"}, "'" + s + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view source) {
  Parser p(Lexer(source).run());
  return p.parse_all();
}

Coefficient parse_constant(std::string_view source) {
  Expression e = parse(source);
  if (!e.is_constant())
    throw InputError("expected a constant but got '" + std::string(source) + "'");
  return e.is_zero() ? Coefficient() : e.terms().begin()->second;
}

}  // namespace hqc
