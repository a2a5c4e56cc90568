#include "reachdec/reach.hpp"

#include "reachdec/error.hpp"

#include <algorithm>
#include <optional>
#include <functional>
#include <set>

namespace reachdec {

const LazySet& ReachTube::block_set(int k, int block) const {
  const auto it = std::lower_bound(tracked.begin(), tracked.end(), block);
  if (it == tracked.end() || *it != block) {
    throw Error("reach", "untracked", "block " + std::to_string(block + 1) + " is not tracked");
  }
  return sets.at(static_cast<std::size_t>(k))[static_cast<std::size_t>(it - tracked.begin())];
}

bool ReachTube::tracks(int block) const { return std::binary_search(tracked.begin(), tracked.end(), block); }

LazySet ReachTube::product(int k) const {
  if (static_cast<int>(tracked.size()) != blocks.count()) {
    throw Error("reach", "untracked", "full reach set needs every block tracked");
  }
  return cartesian_product(sets.at(static_cast<std::size_t>(k)));
}

std::vector<int> blocks_for_variables(const BlockStructure& blocks, const std::vector<int>& variables) {
  std::set<int> out;
  for (int v : variables) {
    if (v < 0 || v >= blocks.dim()) {
      throw Error("reach", "dimension",
                  "variable x" + std::to_string(v + 1) + " outside state dimension " + std::to_string(blocks.dim()));
    }
    out.insert(blocks.block_of(v));
  }
  return {out.begin(), out.end()};
}

namespace {

std::string block_list(const std::vector<int>& blocks) {
  std::string s;
  for (std::size_t i = 0; i < blocks.size(); ++i) s += (i ? ", " : "") + std::to_string(blocks[i] + 1);
  return s;
}

std::vector<int> checked_tracked(const BlockStructure& bs, std::vector<int> tracked) {
  if (tracked.empty()) throw Error("reach", "invalid", "no blocks to track");
  std::sort(tracked.begin(), tracked.end());
  tracked.erase(std::unique(tracked.begin(), tracked.end()), tracked.end());
  if (tracked.front() < 0 || tracked.back() >= bs.count()) {
    throw Error("reach", "dimension",
                "tracked block out of range 1.." + std::to_string(bs.count()) + ": " + block_list(tracked));
  }
  return tracked;
}

bool is_zero(const Eigen::Ref<const Matrix>& m) { return (m.array() == 0.0).all(); }

// Shared engine for the reach tube and for property checking: yields the
// per-block sets for k = 0, 1, 2, ... Step k depends only on the decomposed
// initial set, row-blocks of Phi^k and Phi^{k-1}, and the input accumulator,
// never on the sets returned for step k-1.
class BlockRecurrence {
 public:
  BlockRecurrence(const DiscreteSystem& sys, int steps, const BlockStructure& bs, std::vector<int> tracked,
                  const ReachOptions& options, bool varying)
      : sys_(sys), bs_(bs), opt_(options), varying_(varying) {
    if (steps < 1) throw Error("reach", "invalid", "number of steps must be at least 1");
    if (sys.dim() != bs.dim()) {
      throw Error("reach", "dimension",
                  "system dimension " + std::to_string(sys.dim()) + " does not match block structure " +
                      std::to_string(bs.dim()));
    }
    tracked_ = checked_tracked(bs, std::move(tracked));
    if (varying_) {
      if (!sys.phi.is_explicit()) {
        throw Error("reach", "unsupported", "per-step inputs need an explicit transition matrix");
      }
      if (!sys.v.is_constant() && sys.v.length() < static_cast<std::size_t>(steps)) {
        throw Error("reach", "invalid",
                    "input sequence has " + std::to_string(sys.v.length()) + " sets but " + std::to_string(steps) +
                        " steps were requested");
      }
    } else if (!sys.v.is_constant()) {
      throw Error("reach", "invalid", "constant-input recurrence called with an input sequence");
    }

    x0_ = decompose(sys.x_init, bs, opt_.scheme);
    if (std::all_of(x0_.begin(), x0_.end(), [](const LazySet& s) { return s.get_if<Hyperrectangle>(); })) {
      Vector c(bs.dim()), r(bs.dim());
      for (int j = 0; j < bs.count(); ++j) {
        const auto& h = *x0_[static_cast<std::size_t>(j)].get_if<Hyperrectangle>();
        c.segment(bs[j].start, bs[j].size) = h.center();
        r.segment(bs[j].start, bs[j].size) = h.radius();
      }
      x0_box_.emplace(std::move(c), std::move(r));
    }

    const bool all_tracked = static_cast<int>(tracked_.size()) == bs.count();
    bool full = opt_.powers == PowerStrategy::FullPowers ||
                (opt_.powers == PowerStrategy::Auto && all_tracked && sys.phi.is_explicit());
    if (full) {
      powers_.emplace(sys.phi.matrix());
    } else {
      for (int i : tracked_) rows_.push_back(bs.projection(i));
    }

    const auto& w_blocks = varying_ ? bs.all_blocks() : tracked_;
    for (int i : w_blocks) w_.push_back(zero_set(bs[i].size));
  }

  const std::vector<int>& tracked() const { return tracked_; }

  std::vector<LazySet> next() {
    std::vector<LazySet> out;
    out.reserve(tracked_.size());
    if (k_ == 0) {
      for (int i : tracked_) out.push_back(x0_[static_cast<std::size_t>(i)]);
      ++k_;
      return out;
    }

    std::vector<Matrix> prev_rows;
    if (!powers_) {
      prev_rows = rows_;
      for (auto& r : rows_) {
        r = sys_.phi.left_multiply(r);
        if (!r.allFinite()) {
          throw Error("reach", "nonfinite", "row-block of Phi^k became non-finite at step " + std::to_string(k_));
        }
      }
    }
    if (varying_) advance_varying_inputs();

    for (std::size_t t = 0; t < tracked_.size(); ++t) {
      const int i = tracked_[t];
      Matrix p_row, q_row;
      const std::vector<int>* nonzero = nullptr;
      if (powers_) {
        p_row = powers_->previous().row_block(i);
        q_row = powers_->current().row_block(i);
        nonzero = &powers_->current().nonzero_blocks(i);
      } else {
        p_row = std::move(prev_rows[t]);
        q_row = rows_[t];
      }
      if (!varying_) {
        LazySet acc = minkowski_sum(w_[t], linear_map(p_row, sys_.v.at(0)));
        w_[t] = opt_.collapse_inputs ? approximate(acc, opt_.scheme) : acc;
      }
      const LazySet& w = varying_ ? w_[static_cast<std::size_t>(i)] : w_[t];
      LazySet sum = minkowski_sum(state_term(q_row, nonzero), w);
      out.push_back(opt_.collapse_states ? approximate(sum, opt_.scheme) : sum);
    }

    if (powers_) {
      try {
        powers_->advance();
      } catch (const Error& e) {
        throw Error("reach", e.kind(), std::string(e.what()) + " (step " + std::to_string(k_ + 1) + ")");
      }
    }
    ++k_;
    return out;
  }

 private:
  // sum_j Phi^k_ij X_j(0) over the nonzero blocks of the row.
  LazySet state_term(const Matrix& q_row, const std::vector<int>* nonzero) const {
    // Box initial blocks: the block sum equals the map of the whole box.
    if (x0_box_) return linear_map(q_row, LazySet(*x0_box_));
    std::vector<LazySet> terms;
    auto add = [&](int j) {
      const auto& r = bs_[j];
      terms.push_back(linear_map(Matrix(q_row.middleCols(r.start, r.size)), x0_[static_cast<std::size_t>(j)]));
    };
    if (nonzero) {
      for (int j : *nonzero) add(j);
    } else {
      for (int j = 0; j < bs_.count(); ++j) {
        if (!is_zero(q_row.middleCols(bs_[j].start, bs_[j].size))) add(j);
      }
    }
    if (terms.empty()) return zero_set(static_cast<int>(q_row.rows()));
    return minkowski_sum(std::move(terms));
  }

  // W_i(k) = Box(sum_j Phi_ij W_j(k-1) + V_i(k-1)) for every block i.
  void advance_varying_inputs() {
    const BlockMatrix& phi = sys_.phi.matrix();
    const std::vector<LazySet> v_hat = decompose(sys_.v.at(static_cast<std::size_t>(k_ - 1)), bs_, opt_.scheme);
    std::vector<LazySet> next;
    next.reserve(w_.size());
    for (int i = 0; i < bs_.count(); ++i) {
      std::vector<LazySet> terms;
      for (int j : phi.nonzero_blocks(i)) terms.push_back(linear_map(phi.block(i, j), w_[static_cast<std::size_t>(j)]));
      terms.push_back(v_hat[static_cast<std::size_t>(i)]);
      next.push_back(approximate(minkowski_sum(std::move(terms)), opt_.scheme));
    }
    w_ = std::move(next);
  }

  const DiscreteSystem& sys_;
  const BlockStructure& bs_;
  ReachOptions opt_;
  bool varying_;
  std::vector<int> tracked_;
  std::vector<LazySet> x0_;
  std::optional<Hyperrectangle> x0_box_;
  std::optional<PowerIterator> powers_;
  std::vector<Matrix> rows_;
  std::vector<LazySet> w_;
  int k_ = 0;
};

ReachTube run_engine(const DiscreteSystem& sys, int steps, const BlockStructure& blocks,
                     const std::vector<int>& tracked, const ReachOptions& options, bool varying) {
  BlockRecurrence engine(sys, steps, blocks, tracked, options, varying);
  ReachTube tube;
  tube.delta = sys.delta;
  tube.model = sys.model;
  tube.blocks = blocks;
  tube.tracked = engine.tracked();
  tube.sets.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) tube.sets.push_back(engine.next());
  return tube;
}

}  // namespace

ReachTube reach_decomposed(const DiscreteSystem& sys, int steps, const BlockStructure& blocks,
                           const std::vector<int>& tracked, const ReachOptions& options) {
  return run_engine(sys, steps, blocks, tracked, options, false);
}

ReachTube reach_decomposed_varying(const DiscreteSystem& sys, int steps, const BlockStructure& blocks,
                                   const std::vector<int>& tracked, const ReachOptions& options) {
  return run_engine(sys, steps, blocks, tracked, options, true);
}

ReachTube reach(const DiscreteSystem& sys, int steps, const BlockStructure& blocks, const std::vector<int>& tracked,
                const ReachOptions& options) {
  return run_engine(sys, steps, blocks, tracked, options, !sys.v.is_constant());
}

LazySet step_block(const DiscreteSystem& sys, int k, const BlockStructure& blocks, int block,
                   const ReachOptions& options) {
  if (k < 0) throw Error("reach", "invalid", "negative step index");
  ReachOptions opt = options;
  opt.powers = PowerStrategy::RowBlocks;
  BlockRecurrence engine(sys, k + 1, blocks, {block}, opt, !sys.v.is_constant());
  std::vector<LazySet> sets;
  for (int s = 0; s <= k; ++s) sets = engine.next();
  return sets.front();
}

std::vector<LazySet> project_output(const ReachTube& tube, const Matrix& m, const ApproxScheme& scheme) {
  const int n = tube.blocks.dim();
  if (m.cols() != n || m.rows() < 1 || m.rows() > 2) {
    throw Error("reach", "dimension",
                "output map must be 1xn or 2xn with n = " + std::to_string(n) + ", got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  std::vector<int> missing;
  for (int j = 0; j < tube.blocks.count(); ++j) {
    const auto& r = tube.blocks[j];
    if (!is_zero(m.middleCols(r.start, r.size)) && !tube.tracks(j)) missing.push_back(j);
  }
  if (!missing.empty()) {
    throw Error("reach", "untracked", "output map uses untracked blocks " + block_list(missing));
  }
  std::vector<LazySet> out;
  out.reserve(static_cast<std::size_t>(tube.steps()));
  for (int i : tube.tracked) {
    if (m.rows() == tube.blocks[i].size && m == tube.blocks.projection(i)) {
      for (int k = 0; k < tube.steps(); ++k) out.push_back(tube.block_set(k, i));
      return out;
    }
  }
  int tracked_dim = 0;
  for (int i : tube.tracked) tracked_dim += tube.blocks[i].size;
  Matrix reduced(m.rows(), tracked_dim);
  int col = 0;
  for (int i : tube.tracked) {
    const auto& r = tube.blocks[i];
    reduced.middleCols(col, r.size) = m.middleCols(r.start, r.size);
    col += r.size;
  }
  for (int k = 0; k < tube.steps(); ++k) {
    out.push_back(approximate(linear_map(reduced, cartesian_product(tube.sets[static_cast<std::size_t>(k)])), scheme));
  }
  return out;
}

namespace {

struct AtomEval {
  bool done = false;
  bool certified = false;
  double value = 0.0;
};

// Returns whether the formula is certified; on failure `failed` names an atom
// responsible for it.
bool certify(const Formula& f, const std::function<const AtomEval&(int)>& eval, int& failed) {
  switch (f.kind) {
    case Formula::Kind::Atom: {
      const bool ok = eval(f.atom).certified;
      if (!ok) failed = f.atom;
      return ok;
    }
    case Formula::Kind::And:
      for (const auto& c : f.children) {
        if (!certify(c, eval, failed)) return false;
      }
      return true;
    case Formula::Kind::Or: {
      int first = -1;
      for (const auto& c : f.children) {
        int tmp = -1;
        if (certify(c, eval, tmp)) return true;
        if (first < 0) first = tmp;
      }
      failed = first;
      return false;
    }
  }
  return false;
}

}  // namespace

CheckResult check_property(const DiscreteSystem& sys, const SafetyProperty& prop, int steps,
                           const BlockStructure& blocks, const ApproxScheme& scheme) {
  if (prop.c.cols() != sys.dim()) {
    throw Error("reach", "dimension",
                "property is over " + std::to_string(prop.c.cols()) + " states, system has " +
                    std::to_string(sys.dim()));
  }
  for (const auto& a : prop.atoms) {
    if (a.input.size() > 0 && a.input.size() != sys.u.dim()) {
      throw Error("reach", "dimension", "feedthrough matrix does not match the input dimension");
    }
  }
  if (!sys.u.is_constant() && sys.u.length() < static_cast<std::size_t>(steps)) {
    throw Error("reach", "invalid", "input sequence shorter than the number of steps");
  }
  std::vector<int> tracked = blocks_for_variables(blocks, prop.variables());
  if (tracked.empty()) tracked.push_back(0);

  ReachOptions options;
  options.scheme = scheme;
  options.collapse_states = false;
  BlockRecurrence engine(sys, steps, blocks, tracked, options, !sys.v.is_constant());

  CheckResult result;
  for (int k = 0; k < steps; ++k) {
    const std::vector<LazySet> sets = engine.next();
    std::vector<AtomEval> cache(prop.atoms.size());
    auto eval = [&](int a) -> const AtomEval& {
      AtomEval& e = cache[static_cast<std::size_t>(a)];
      if (e.done) return e;
      const Atom& atom = prop.atoms[static_cast<std::size_t>(a)];
      double value = 0.0;
      for (std::size_t t = 0; t < tracked.size(); ++t) {
        const auto& r = blocks[tracked[t]];
        const Vector dir = atom.state.segment(r.start, r.size);
        if (!is_zero(dir)) value += support_function(sets[t], dir);
      }
      if (atom.input.size() > 0) value += support_function(sys.u.at(static_cast<std::size_t>(k)), atom.input);
      e.done = true;
      e.value = value;
      e.certified = atom.strict ? value < atom.bound : value <= atom.bound;
      return e;
    };
    int failed = -1;
    result.steps = k + 1;
    if (!certify(prop.formula, eval, failed)) {
      result.verified = false;
      result.violated_step = k;
      result.atom = failed;
      const Atom& atom = prop.atoms[static_cast<std::size_t>(failed)];
      result.atom_text = atom.text;
      result.support = eval(failed).value;
      result.bound = atom.bound;
      return result;
    }
  }
  result.verified = true;
  return result;
}

}  // namespace reachdec
