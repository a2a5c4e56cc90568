#pragma once

#include "reachdec/sets.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace reachdec {

/// Linear constraint  state . x + input . u  <  bound  (or <= when not strict),
/// with outputs y = C x + D u already expanded.
struct Atom {
  Vector state;
  Vector input;  ///< empty when there is no feedthrough
  double bound;
  bool strict;
  std::string text;  ///< source text, for diagnostics
};

/// AND/OR tree over atoms.
struct Formula {
  enum class Kind { Atom, And, Or };
  Kind kind = Kind::Atom;
  int atom = -1;  ///< index into SafetyProperty::atoms when kind == Atom
  std::vector<Formula> children;
};

struct SafetyProperty {
  Matrix c;  ///< p x n; identity when no outputs are given
  Matrix d;  ///< p x m, or empty
  std::vector<Atom> atoms;
  Formula formula;
  std::string text;

  /// State variables (0-based) with a nonzero coefficient in some atom.
  std::vector<int> variables() const;
};

/// Parses formulas such as "2*x1 - 3*x5 < 10 && (y1 >= -1 || x2 <= 4)".
/// Variables are x1..xn and, when C is given, y1..yp (1-based). Both sides of
/// a comparison may hold linear expressions.
SafetyProperty parse_property(const std::string& text, int state_dim, const std::optional<Matrix>& c = std::nullopt,
                              const std::optional<Matrix>& d = std::nullopt);

}  // namespace reachdec
