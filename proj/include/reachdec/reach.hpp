#pragma once

#include "reachdec/approx.hpp"
#include "reachdec/blocks.hpp"
#include "reachdec/discretize.hpp"
#include "reachdec/property.hpp"

#include <vector>

namespace reachdec {

/// Per-step, per-block overapproximation of the reach tube. Entry k covers
/// [k delta, (k+1) delta] in the dense-time model and the instant k delta in
/// the discrete-time model.
struct ReachTube {
  double delta = 0.0;
  TimeModel model = TimeModel::DiscreteTime;
  BlockStructure blocks{1};
  std::vector<int> tracked;                 ///< sorted block indices
  std::vector<std::vector<LazySet>> sets;   ///< sets[k][position of block in tracked]

  int steps() const { return static_cast<int>(sets.size()); }
  const LazySet& block_set(int k, int block) const;
  double time_lo(int k) const { return k * delta; }
  double time_hi(int k) const { return model == TimeModel::DenseTime ? (k + 1) * delta : k * delta; }
  bool tracks(int block) const;
  /// Cartesian product of the tracked blocks at step k; requires every block.
  LazySet product(int k) const;
};

/// How row-blocks of Phi^k are obtained.
enum class PowerStrategy {
  Auto,        ///< full powers when every block is tracked and Phi is explicit
  RowBlocks,   ///< propagate only the tracked row-blocks: R <- R Phi
  FullPowers   ///< P <- Q, Q <- Q Phi on the whole matrix
};

struct ReachOptions {
  ApproxScheme scheme;
  /// Collapse the input accumulator of each block every step.
  bool collapse_inputs = true;
  /// Collapse each stored block set. Off keeps the exact lazy sum.
  bool collapse_states = true;
  PowerStrategy powers = PowerStrategy::Auto;
};

/// Decomposed reach tube for constant inputs; N entries, k = 0..N-1.
ReachTube reach_decomposed(const DiscreteSystem& sys, int steps, const BlockStructure& blocks,
                           const std::vector<int>& tracked, const ReachOptions& options = {});

/// Decomposed reach tube for per-step inputs. All input accumulator blocks are
/// propagated whatever is tracked; Phi must be explicit. Input accumulators are
/// always collapsed.
ReachTube reach_decomposed_varying(const DiscreteSystem& sys, int steps, const BlockStructure& blocks,
                                   const std::vector<int>& tracked, const ReachOptions& options = {});

/// Dispatches on whether the system's inputs are constant.
ReachTube reach(const DiscreteSystem& sys, int steps, const BlockStructure& blocks,
                const std::vector<int>& tracked, const ReachOptions& options = {});

/// Recomputes entry k of one block from scratch with row-block propagation.
LazySet step_block(const DiscreteSystem& sys, int k, const BlockStructure& blocks, int block,
                   const ReachOptions& options = {});

/// Per-step image of the tracked product under a 1 x n or 2 x n map,
/// collapsed with `scheme`. Throws when M touches untracked blocks.
std::vector<LazySet> project_output(const ReachTube& tube, const Matrix& m, const ApproxScheme& scheme);

struct CheckResult {
  bool verified = false;
  int steps = 0;              ///< steps examined
  int violated_step = -1;     ///< first uncertified step
  int atom = -1;              ///< offending atom
  std::string atom_text;
  double support = 0.0;       ///< certified upper value of the atom expression
  double bound = 0.0;
};

/// Evaluates every atom on the lazy per-step sets of the blocks the property
/// touches and stops at the first step that is not certified. A violation
/// means "not certified", not a counterexample.
CheckResult check_property(const DiscreteSystem& sys, const SafetyProperty& prop, int steps,
                           const BlockStructure& blocks, const ApproxScheme& scheme = {});

/// Blocks holding at least one of the given variables.
std::vector<int> blocks_for_variables(const BlockStructure& blocks, const std::vector<int>& variables);

}  // namespace reachdec
