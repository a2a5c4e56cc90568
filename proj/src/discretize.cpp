#include "reachdec/discretize.hpp"

#include "reachdec/error.hpp"

namespace reachdec {

InputSpec::InputSpec(std::vector<LazySet> sets, bool constant) : sets_(std::move(sets)), constant_(constant) {
  if (sets_.empty()) throw Error("discretize", "invalid", "input sequence is empty");
  for (std::size_t k = 1; k < sets_.size(); ++k) {
    if (sets_[k].dim() != sets_[0].dim()) {
      throw Error("discretize", "dimension",
                  "input set " + std::to_string(k) + " has dimension " + std::to_string(sets_[k].dim()) +
                      ", expected " + std::to_string(sets_[0].dim()));
    }
  }
}

InputSpec InputSpec::constant(LazySet u) { return InputSpec({std::move(u)}, true); }

InputSpec InputSpec::sequence(std::vector<LazySet> sets) { return InputSpec(std::move(sets), false); }

const LazySet& InputSpec::at(std::size_t k) const {
  if (constant_) return sets_.front();
  if (k >= sets_.size()) {
    throw Error("discretize", "invalid",
                "input sequence has " + std::to_string(sets_.size()) + " sets, step " + std::to_string(k) +
                    " requested");
  }
  return sets_[k];
}

ContinuousSystem::ContinuousSystem(BlockMatrix a_, std::optional<BlockMatrix> b_, LazySet x0_,
                                   std::optional<InputSpec> u_)
    : a(std::move(a_)),
      b(std::move(b_)),
      x0(std::move(x0_)),
      u(u_ ? std::move(*u_) : InputSpec::constant(zero_set(b ? static_cast<int>(b->cols()) : static_cast<int>(a.rows())))) {
  if (a.rows() != a.cols()) {
    throw Error("discretize", "dimension",
                "A must be square, got " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (x0.dim() != dim()) {
    throw Error("discretize", "dimension",
                "A is " + std::to_string(dim()) + "x" + std::to_string(dim()) + " but X0 has dimension " +
                    std::to_string(x0.dim()));
  }
  if (b && b->rows() != a.rows()) {
    throw Error("discretize", "dimension",
                "B has " + std::to_string(b->rows()) + " rows, A has " + std::to_string(a.rows()));
  }
  if (u.dim() != input_dim()) {
    throw Error("discretize", "dimension",
                "input sets have dimension " + std::to_string(u.dim()) + ", expected " +
                    std::to_string(input_dim()));
  }
}

LazySet ContinuousSystem::mapped_input(std::size_t k) const {
  return b ? linear_map(b->dense(), u.at(k)) : u.at(k);
}

const char* to_string(TimeModel model) { return model == TimeModel::DenseTime ? "dense" : "discrete"; }

namespace {

// Keeps Phi sparse when the input was sparse and Phi stayed block sparse.
BlockMatrix store_like_input(BlockMatrix phi, const BlockMatrix& a) {
  if (a.is_sparse() && phi.block_density() <= 0.25) return phi.to_sparse();
  return phi;
}

// Rejects unbounded sets before any propagation starts.
void require_bounded(const LazySet& x, const std::string& what) {
  try {
    (void)symmetric_interval_hull(x);
  } catch (const Error& e) {
    throw Error("discretize", "unbounded", what + " is not bounded: " + e.what());
  }
}

}  // namespace

DiscreteSystem discretize_dense(const ContinuousSystem& sys, double delta) {
  if (!(delta > 0.0)) throw Error("discretize", "invalid", "time step must be positive");
  require_bounded(sys.x0, "X0");
  for (const auto& s : sys.u.sets()) require_bounded(s, "U");

  const int n = sys.dim();
  const Matrix a = sys.a.dense();
  BlockMatrix phi = store_like_input(exp_matrix(sys.a, delta), sys.a);
  const Matrix phi2_abs = discretization_matrices(sys.a.cwise_abs(), delta).phi2.dense();

  // Box(Phi2(|A|) Box(M X)): Phi2(|A|) is entrywise nonnegative, so the outer
  // hull of the centred box has radius Phi2(|A|) r.
  auto bloat = [&](const LazySet& x) {
    const Hyperrectangle inner = symmetric_interval_hull(x);
    return Hyperrectangle(Vector::Zero(n), phi2_abs * inner.radius());
  };

  const LazySet e_plus = bloat(linear_map(Matrix(a * a), sys.x0));
  std::vector<LazySet> v;
  v.reserve(sys.u.length());
  LazySet first_input = zero_set(n);
  for (std::size_t k = 0; k < sys.u.length(); ++k) {
    const LazySet bu = sys.mapped_input(k);
    const LazySet e_psi = bloat(linear_map(a, bu));
    v.push_back(minkowski_sum(scale(delta, bu), e_psi));
    if (k == 0) first_input = v.back();
  }
  const LazySet x_init =
      convex_hull(sys.x0, minkowski_sum({linear_map(phi.dense(), sys.x0), first_input, e_plus}));
  InputSpec vs = sys.u.is_constant() ? InputSpec::constant(v.front()) : InputSpec::sequence(std::move(v));
  return {Transition(std::move(phi)), x_init, std::move(vs), delta, TimeModel::DenseTime, sys.u};
}

DiscreteSystem discretize_discrete(const ContinuousSystem& sys, double delta, ExponentialMode mode) {
  if (!(delta > 0.0)) throw Error("discretize", "invalid", "time step must be positive");
  require_bounded(sys.x0, "X0");
  for (const auto& s : sys.u.sets()) require_bounded(s, "U");

  std::vector<LazySet> v;
  v.reserve(sys.u.length());
  std::optional<Transition> phi;
  if (mode == ExponentialMode::Explicit) {
    auto m = discretization_matrices(sys.a, delta);
    const Matrix phi1 = m.phi1.dense();
    const Matrix map = sys.b ? Matrix(phi1 * sys.b->dense()) : phi1;
    for (const auto& u : sys.u.sets()) v.push_back(linear_map(map, u));
    phi.emplace(store_like_input(std::move(m.phi), sys.a));
  } else {
    const SparseMatrix a = sys.a.sparse();
    auto phi1 = std::make_shared<const IntegralOperator>(a, delta, 1);
    for (std::size_t k = 0; k < sys.u.length(); ++k) v.push_back(linear_map(phi1, sys.mapped_input(k)));
    phi.emplace(Transition::lazy_exponential(a, delta));
  }
  InputSpec vs = sys.u.is_constant() ? InputSpec::constant(v.front()) : InputSpec::sequence(std::move(v));
  return {std::move(*phi), sys.x0, std::move(vs), delta, TimeModel::DiscreteTime, sys.u};
}

}  // namespace reachdec
