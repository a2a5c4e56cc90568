#include "reachdec/property.hpp"

#include "reachdec/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>

namespace reachdec {

namespace {

[[noreturn]] void syntax_error(const std::string& text, std::size_t pos, const std::string& what) {
  throw Error("reach", "property", what + " at column " + std::to_string(pos + 1) + " in '" + text + "'");
}

struct LinearExpr {
  Vector x;
  Vector y;
  double constant = 0.0;

  LinearExpr& operator+=(const LinearExpr& o) {
    x += o.x;
    y += o.y;
    constant += o.constant;
    return *this;
  }
  LinearExpr& operator*=(double s) {
    x *= s;
    y *= s;
    constant *= s;
    return *this;
  }
  bool is_constant() const { return (x.array() == 0.0).all() && (y.array() == 0.0).all(); }
};

class Parser {
 public:
  Parser(const std::string& text, SafetyProperty& prop, int n, int p, bool has_outputs)
      : text_(text), prop_(prop), n_(n), p_(p), has_outputs_(has_outputs) {}

  Formula parse() {
    Formula f = disjunction();
    skip_space();
    if (pos_ != text_.size()) syntax_error(text_, pos_, "unexpected '" + text_.substr(pos_, 1) + "'");
    return f;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(const char* token) {
    skip_space();
    const std::string t(token);
    if (text_.compare(pos_, t.size(), t) == 0) {
      pos_ += t.size();
      return true;
    }
    return false;
  }

  Formula combine(Formula::Kind kind, std::vector<Formula> parts) {
    if (parts.size() == 1) return std::move(parts.front());
    Formula f;
    f.kind = kind;
    f.children = std::move(parts);
    return f;
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (accept("||")) parts.push_back(conjunction());
    return combine(Formula::Kind::Or, std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (accept("&&")) parts.push_back(unary());
    return combine(Formula::Kind::And, std::move(parts));
  }

  Formula unary() {
    skip_space();
    const std::size_t start = pos_;
    const std::size_t atoms_before = prop_.atoms.size();
    try {
      return atom();
    } catch (const Error&) {
      pos_ = start;
      prop_.atoms.resize(atoms_before);
      if (!accept("(")) throw;
    }
    Formula inner = disjunction();
    if (!accept(")")) syntax_error(text_, pos_, "expected ')'");
    return inner;
  }

  Formula atom() {
    skip_space();
    const std::size_t start = pos_;
    LinearExpr lhs = expression();
    bool strict = true;
    bool less = true;
    if (accept("<=")) {
      strict = false;
    } else if (accept(">=")) {
      strict = false;
      less = false;
    } else if (accept("<")) {
    } else if (accept(">")) {
      less = false;
    } else {
      syntax_error(text_, pos_, "expected a comparison (<, <=, >, >=)");
    }
    LinearExpr rhs = expression();
    LinearExpr diff = lhs;
    rhs *= -1.0;
    diff += rhs;
    if (!less) diff *= -1.0;
    if (diff.is_constant()) syntax_error(text_, start, "comparison has no variables");

    Atom a;
    a.state = diff.x;
    if (has_outputs_) a.state += prop_.c.transpose() * diff.y;
    if (prop_.d.size() > 0 && (diff.y.array() != 0.0).any()) a.input = prop_.d.transpose() * diff.y;
    a.bound = -diff.constant;
    a.strict = strict;
    std::string src = text_.substr(start, pos_ - start);
    src.erase(src.find_last_not_of(" \t") + 1);
    a.text = src;
    prop_.atoms.push_back(std::move(a));
    Formula f;
    f.atom = static_cast<int>(prop_.atoms.size()) - 1;
    return f;
  }

  LinearExpr zero() const { return {Vector::Zero(n_), Vector::Zero(p_), 0.0}; }

  LinearExpr expression() {
    LinearExpr sum = zero();
    bool first = true;
    for (;;) {
      double sign = 1.0;
      if (accept("+")) {
      } else if (accept("-")) {
        sign = -1.0;
      } else if (!first) {
        break;
      }
      LinearExpr t = term();
      t *= sign;
      sum += t;
      first = false;
    }
    return sum;
  }

  LinearExpr term() {
    LinearExpr value = primary();
    while (accept("*")) {
      LinearExpr rhs = primary();
      if (value.is_constant()) {
        rhs *= value.constant;
        value = rhs;
      } else if (rhs.is_constant()) {
        value *= rhs.constant;
      } else {
        syntax_error(text_, pos_, "product of two variables is not linear");
      }
    }
    return value;
  }

  LinearExpr primary() {
    skip_space();
    if (pos_ >= text_.size()) syntax_error(text_, pos_, "unexpected end of formula");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      LinearExpr inner = expression();
      if (!accept(")")) syntax_error(text_, pos_, "expected ')'");
      return inner;
    }
    if (c == 'x' || c == 'y') {
      const std::size_t start = pos_++;
      std::size_t digits = pos_;
      while (digits < text_.size() && std::isdigit(static_cast<unsigned char>(text_[digits]))) ++digits;
      if (digits == pos_) syntax_error(text_, start, "expected a variable index after '" + std::string(1, c) + "'");
      const long index = std::strtol(text_.c_str() + pos_, nullptr, 10);
      pos_ = digits;
      LinearExpr e = zero();
      if (c == 'x') {
        if (index < 1 || index > n_) {
          syntax_error(text_, start, "state variable x" + std::to_string(index) + " out of range 1.." +
                                         std::to_string(n_));
        }
        e.x[index - 1] = 1.0;
      } else {
        if (!has_outputs_) syntax_error(text_, start, "output variable used but no output matrix C was given");
        if (index < 1 || index > p_) {
          syntax_error(text_, start, "output variable y" + std::to_string(index) + " out of range 1.." +
                                         std::to_string(p_));
        }
        e.y[index - 1] = 1.0;
      }
      return e;
    }
    char* end = nullptr;
    const double value = std::strtod(text_.c_str() + pos_, &end);
    if (end == text_.c_str() + pos_) syntax_error(text_, pos_, "expected a number or variable");
    pos_ = static_cast<std::size_t>(end - text_.c_str());
    LinearExpr e = zero();
    e.constant = value;
    // Implicit product such as "2x1".
    skip_space();
    if (pos_ < text_.size() && (text_[pos_] == 'x' || text_[pos_] == 'y')) {
      LinearExpr v = primary();
      v *= value;
      return v;
    }
    return e;
  }

  const std::string& text_;
  SafetyProperty& prop_;
  int n_;
  int p_;
  bool has_outputs_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<int> SafetyProperty::variables() const {
  std::set<int> vars;
  for (const auto& a : atoms) {
    for (Eigen::Index i = 0; i < a.state.size(); ++i) {
      if (a.state[i] != 0.0) vars.insert(static_cast<int>(i));
    }
  }
  return {vars.begin(), vars.end()};
}

SafetyProperty parse_property(const std::string& text, int state_dim, const std::optional<Matrix>& c,
                              const std::optional<Matrix>& d) {
  SafetyProperty prop;
  prop.text = text;
  if (c) {
    if (c->cols() != state_dim) {
      throw Error("reach", "dimension",
                  "C has " + std::to_string(c->cols()) + " columns, state dimension is " + std::to_string(state_dim));
    }
    prop.c = *c;
  } else {
    prop.c = Matrix::Identity(state_dim, state_dim);
  }
  if (d) {
    if (!c) throw Error("reach", "dimension", "D given without C");
    if (d->rows() != c->rows()) {
      throw Error("reach", "dimension",
                  "D has " + std::to_string(d->rows()) + " rows, C has " + std::to_string(c->rows()));
    }
    prop.d = *d;
  }
  Parser parser(text, prop, state_dim, static_cast<int>(prop.c.rows()), c.has_value());
  prop.formula = parser.parse();
  return prop;
}

}  // namespace reachdec
