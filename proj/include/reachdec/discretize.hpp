#pragma once

#include "reachdec/linalg.hpp"
#include "reachdec/sets.hpp"

#include <optional>
#include <vector>

namespace reachdec {

/// A constant input set or one set per step.
class InputSpec {
 public:
  static InputSpec constant(LazySet u);
  static InputSpec sequence(std::vector<LazySet> sets);

  bool is_constant() const { return constant_; }
  int dim() const { return sets_.front().dim(); }
  /// Number of sets held (1 for a constant input).
  std::size_t length() const { return sets_.size(); }
  /// U(k); a constant input returns the same set for every k.
  const LazySet& at(std::size_t k) const;
  const std::vector<LazySet>& sets() const { return sets_; }

 private:
  InputSpec(std::vector<LazySet> sets, bool constant);
  std::vector<LazySet> sets_;
  bool constant_;
};

/// x' = A x + B u, x(0) in X0, u(t) in U(t).
struct ContinuousSystem {
  /// Validates dimensions. Without B the inputs live in the state space.
  /// Without U the input is the singleton {0}.
  ContinuousSystem(BlockMatrix a, std::optional<BlockMatrix> b, LazySet x0,
                   std::optional<InputSpec> u = std::nullopt);

  int dim() const { return static_cast<int>(a.rows()); }
  int input_dim() const { return b ? static_cast<int>(b->cols()) : dim(); }
  /// B U(k), or U(k) when B is absent.
  LazySet mapped_input(std::size_t k) const;

  BlockMatrix a;
  std::optional<BlockMatrix> b;
  LazySet x0;
  InputSpec u;
};

enum class TimeModel { DenseTime, DiscreteTime };

const char* to_string(TimeModel model);

/// X(k+1) = Phi X(k) + V(k).
struct DiscreteSystem {
  Transition phi;
  LazySet x_init;
  InputSpec v;
  double delta;
  TimeModel model;
  /// The untransformed input sets, kept for output feedthrough terms D u.
  InputSpec u;

  int dim() const { return static_cast<int>(phi.dim()); }
};

/// How the discrete-time model holds e^{A delta}.
enum class ExponentialMode {
  Explicit,  ///< dense Pade exponential
  Lazy       ///< Krylov action on vectors, never formed
};

/// Bloated model covering all trajectories on [k delta, (k+1) delta].
DiscreteSystem discretize_dense(const ContinuousSystem& sys, double delta);

/// Sampled model: X(0) = X0, V(k) = Phi1(A, delta) B U(k).
DiscreteSystem discretize_discrete(const ContinuousSystem& sys, double delta,
                                   ExponentialMode mode = ExponentialMode::Explicit);

}  // namespace reachdec
