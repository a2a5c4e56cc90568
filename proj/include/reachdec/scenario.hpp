#pragma once

#include "reachdec/approx.hpp"
#include "reachdec/discretize.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace reachdec {

/// A validated analysis problem read from JSON.
///
/// {
///   "A": "a.mtx",                 MatrixMarket, relative to the scenario file
///   "B": "b.mtx",                 optional
///   "X0": <set>,
///   "U": <set> | {"sequence": [<set>, ...]} | {"sequence_file": "u.json"},   optional
///   "delta": 0.1, "N": 10, "model": "dense" | "discrete",
///   "exponential": "explicit" | "lazy",      optional, discrete model only
///   "blocks": [1, 2] | "variables": [1, 5],  optional, 1-based
///   "property": "x1 < 0.5",                  optional
///   "C": [[...], ...] | "c.mtx", "D": ...,   optional output matrices
///   "scheme": "box" | "eps:0.01", "seed": 42 optional
/// }
///
/// <set> is one of {"box": {"low": [...], "high": [...]}},
/// {"box": {"center": [...], "radius": [...]}}, {"intervals": [[lo, hi], ...]},
/// {"point": [...]}, {"ball": {"center": [...], "radius": r, "p": 1 | 2 | "inf"}}
/// or {"polygon": [{"a": [a1, a2], "b": b}, ...]}.
struct Scenario {
  ContinuousSystem system;
  double delta = 0.0;
  int steps = 0;
  TimeModel model = TimeModel::DiscreteTime;
  ExponentialMode exponential = ExponentialMode::Explicit;
  std::vector<int> tracked;  ///< 0-based blocks
  std::optional<std::string> property;
  std::optional<Matrix> c;
  std::optional<Matrix> d;
  ApproxScheme scheme;
  std::uint64_t seed = 0;
};

/// Parses and validates a scenario. Relative paths resolve against base_dir.
/// Errors are Error("cli", ...) with messages of the form "$.field.sub: ...".
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir);
Scenario parse_scenario_file(const std::string& path);

/// The discrete recurrence the scenario asks for.
DiscreteSystem discretize(const Scenario& scenario);

}  // namespace reachdec
