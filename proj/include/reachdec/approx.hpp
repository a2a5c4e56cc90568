#pragma once

#include "reachdec/blocks.hpp"
#include "reachdec/sets.hpp"

#include <string>
#include <vector>

namespace reachdec {

/// How 2D (or 1D) lazy sets are collapsed to concrete ones.
struct ApproxScheme {
  enum class Kind { BoxDirections, EpsilonClose };

  Kind kind = Kind::BoxDirections;
  double epsilon = 0.0;

  static ApproxScheme box() { return {}; }
  static ApproxScheme epsilon_close(double eps);
  /// Parses "box" or "eps:<value>".
  static ApproxScheme parse(const std::string& text);
  std::string to_string() const;
};

/// Tightest axis-aligned box around x from the 2n support values rho(+-e_i).
/// A Hyperrectangle is returned unchanged.
Hyperrectangle overapproximate_box(const LazySet& x);

struct EpsOptions {
  std::size_t max_constraints = 10000;
};

/// Outer polygon within Euclidean Hausdorff distance eps of the 2D set x,
/// refined by angular bisection from the box directions.
HPolygon overapproximate_eps(const LazySet& x, double eps, const EpsOptions& options = {});

/// Collapses a 1D or 2D set by the given scheme. One-dimensional sets always
/// become intervals.
LazySet approximate(const LazySet& x, const ApproxScheme& scheme);

/// Overapproximates the Cartesian decomposition of x: one low-dimensional set
/// per block. Boxes and singletons decompose exactly.
std::vector<LazySet> decompose(const LazySet& x, const BlockStructure& blocks,
                               const ApproxScheme& scheme);

}  // namespace reachdec
