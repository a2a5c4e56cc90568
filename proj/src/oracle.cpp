#include "reachdec/oracle.hpp"

#include "reachdec/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reachdec {

// ---------------------------------------------------------------------------
// Directions

Matrix circle_directions(int count) {
  if (count < 1) throw Error("oracle", "invalid", "need at least one direction");
  Matrix d(2, count);
  for (int i = 0; i < count; ++i) {
    const double angle = 2.0 * M_PI * i / count;
    d(0, i) = std::cos(angle);
    d(1, i) = std::sin(angle);
  }
  return d;
}

namespace {

double radical_inverse(long index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

int nth_prime(int n) {
  int count = 0;
  for (int candidate = 2;; ++candidate) {
    bool prime = true;
    for (int d = 2; d * d <= candidate; ++d) {
      if (candidate % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime && count++ == n) return candidate;
  }
}

}  // namespace

Matrix sphere_directions(int dim, int count) {
  if (dim < 1 || count < 1) throw Error("oracle", "invalid", "sphere_directions: dimension and count must be positive");
  Matrix d = Matrix::Zero(dim, count);
  int col = 0;
  for (int i = 0; i < dim && col < count; ++i) {
    d(i, col++) = 1.0;
    if (col < count) d(i, col++) = -1.0;
  }
  const int pairs = (dim + 1) / 2;
  std::vector<int> bases(static_cast<std::size_t>(2 * pairs));
  for (int j = 0; j < 2 * pairs; ++j) bases[static_cast<std::size_t>(j)] = nth_prime(j);
  for (long index = 1; col < count; ++index) {
    Vector z(2 * pairs);
    for (int j = 0; j < pairs; ++j) {
      const double u1 = radical_inverse(index, bases[static_cast<std::size_t>(2 * j)]);
      const double u2 = radical_inverse(index, bases[static_cast<std::size_t>(2 * j + 1)]);
      const double r = std::sqrt(-2.0 * std::log(u1));
      z[2 * j] = r * std::cos(2.0 * M_PI * u2);
      z[2 * j + 1] = r * std::sin(2.0 * M_PI * u2);
    }
    const Vector v = z.head(dim);
    const double nv = v.norm();
    if (nv == 0.0 || !std::isfinite(nv)) continue;
    d.col(col++) = v / nv;
  }
  return d;
}

Matrix random_directions(int dim, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix d(dim, count);
  for (int j = 0; j < count; ++j) {
    Vector v(dim);
    do {
      for (int i = 0; i < dim; ++i) v[i] = normal(rng);
    } while (v.norm() == 0.0);
    d.col(j) = v / v.norm();
  }
  return d;
}

// ---------------------------------------------------------------------------
// Non-decomposed reference

Matrix reach_nondecomposed(const DiscreteSystem& sys, int steps, const Matrix& directions) {
  if (steps < 1) throw Error("oracle", "invalid", "number of steps must be at least 1");
  if (directions.cols() == 0) throw Error("oracle", "invalid", "no directions given");
  if (directions.rows() != sys.dim()) {
    throw Error("oracle", "dimension",
                "directions have dimension " + std::to_string(directions.rows()) + ", system has " +
                    std::to_string(sys.dim()));
  }
  const bool constant = sys.v.is_constant();
  if (!constant && sys.v.length() + 1 < static_cast<std::size_t>(steps)) {
    throw Error("oracle", "invalid", "input sequence shorter than the number of steps");
  }
  Matrix out(steps, directions.cols());
  std::vector<Vector> powers;  // (Phi^T)^s l, kept for per-step inputs
  for (Eigen::Index c = 0; c < directions.cols(); ++c) {
    Vector d = directions.col(c);
    double accumulated = 0.0;
    powers.clear();
    for (int k = 0; k < steps; ++k) {
      if (constant) {
        out(k, c) = support_function(sys.x_init, d) + accumulated;
        accumulated += support_function(sys.v.at(0), d);
      } else {
        powers.push_back(d);
        double w = 0.0;
        for (int s = 0; s < k; ++s) {
          w += support_function(sys.v.at(static_cast<std::size_t>(s)), powers[static_cast<std::size_t>(k - 1 - s)]);
        }
        out(k, c) = support_function(sys.x_init, d) + w;
      }
      if (k + 1 < steps) {
        d = sys.phi.apply_transpose(d);
        if (!d.allFinite()) throw Error("oracle", "nonfinite", "direction overflowed at step " + std::to_string(k + 1));
      }
    }
  }
  return out;
}

LazySet nondecomposed_set(const DiscreteSystem& sys, int k) {
  if (k < 0) throw Error("oracle", "invalid", "negative step index");
  const Matrix phi = sys.phi.matrix().dense();
  const int n = sys.dim();
  std::vector<Matrix> powers{Matrix::Identity(n, n)};
  for (int s = 1; s <= k; ++s) powers.push_back(powers.back() * phi);
  std::vector<LazySet> terms{linear_map(powers[static_cast<std::size_t>(k)], sys.x_init)};
  for (int s = 0; s < k; ++s) {
    if (sys.v.is_constant()) {
      terms.push_back(linear_map(powers[static_cast<std::size_t>(s)], sys.v.at(0)));
    } else {
      terms.push_back(linear_map(powers[static_cast<std::size_t>(k - 1 - s)], sys.v.at(static_cast<std::size_t>(s))));
    }
  }
  return minkowski_sum(std::move(terms));
}

double hausdorff_estimate(const LazySet& x, const LazySet& y, Norm p, const Matrix& directions) {
  if (x.dim() != y.dim() || directions.rows() != x.dim()) {
    throw Error("oracle", "dimension", "hausdorff_estimate: dimensions of sets and directions differ");
  }
  const Norm q = dual(p);
  double best = 0.0;
  double worst = std::numeric_limits<double>::infinity();
  int worst_col = -1;
  for (Eigen::Index c = 0; c < directions.cols(); ++c) {
    const Vector l = directions.col(c);
    const double scale = norm(l, q);
    if (scale == 0.0) continue;
    const double gap = (support_function(y, l) - support_function(x, l)) / scale;
    best = std::max(best, gap);
    if (gap < worst) {
      worst = gap;
      worst_col = static_cast<int>(c);
    }
  }
  if (worst < -1e-9) {
    throw Error("oracle", "containment",
                "first set is not inside the second: gap " + std::to_string(worst) + " in direction " +
                    std::to_string(worst_col));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Analytic bounds

double block_diameter(const LazySet& x, Norm p) {
  const int dim = x.dim();
  auto width = [&](const Vector& d) { return support_function(x, d) + support_function(x, -d); };
  double best = 0.0;
  switch (p) {
    case Norm::Inf: {
      // Dual unit ball is the cross-polytope: its vertices are +-e_i.
      Vector e = Vector::Zero(dim);
      for (int i = 0; i < dim; ++i) {
        e[i] = 1.0;
        best = std::max(best, width(e));
        e[i] = 0.0;
      }
      return best;
    }
    case Norm::One: {
      if (dim > 16) throw Error("oracle", "unsupported", "1-norm diameter limited to 16 dimensions");
      // Dual unit ball is the cube; width is even, so half the sign vectors suffice.
      for (long mask = 0; mask < (1L << (dim - 1)); ++mask) {
        Vector d(dim);
        for (int i = 0; i < dim; ++i) d[i] = (i == dim - 1 || !(mask & (1L << i))) ? 1.0 : -1.0;
        best = std::max(best, width(d));
      }
      return best;
    }
    case Norm::Two: {
      if (dim == 1) return width(Vector::Ones(1));
      if (dim != 2) throw Error("oracle", "unsupported", "2-norm diameter implemented for blocks of size <= 2");
      constexpr int samples = 4096;
      const Matrix dirs = circle_directions(samples);
      for (int c = 0; c < samples / 2; ++c) best = std::max(best, width(dirs.col(c)));
      // Every unit vector is a combination of two neighbouring samples with
      // coefficient sum at most 1/cos(gamma/2); width is sublinear.
      return best / std::cos(M_PI / samples);
    }
  }
  return best;
}

ColumnBlockNorms column_block_norms(const BlockMatrix& phi, Norm p) {
  const int b = phi.col_blocks();
  std::vector<double> first(static_cast<std::size_t>(b), 0.0), second(static_cast<std::size_t>(b), 0.0);
  ColumnBlockNorms out;
  out.q.assign(static_cast<std::size_t>(b), 0);
  for (int i = 0; i < phi.row_blocks(); ++i) {
    for (int j : phi.nonzero_blocks(i)) {
      const double v = matrix_norm(phi.block(i, j), p);
      const auto js = static_cast<std::size_t>(j);
      if (v > first[js]) {
        second[js] = first[js];
        first[js] = v;
        out.q[js] = i;
      } else if (v > second[js]) {
        second[js] = v;
      }
    }
  }
  out.alpha = std::move(second);
  return out;
}

std::vector<LazySet> decomposed_image(const BlockMatrix& phi, const std::vector<LazySet>& blocks) {
  if (static_cast<int>(blocks.size()) != phi.col_blocks()) {
    throw Error("oracle", "dimension", "decomposed_image: number of blocks does not match the matrix");
  }
  std::vector<LazySet> out;
  for (int i = 0; i < phi.row_blocks(); ++i) {
    std::vector<LazySet> terms;
    for (int j : phi.nonzero_blocks(i)) terms.push_back(linear_map(phi.block(i, j), blocks[static_cast<std::size_t>(j)]));
    const int size = static_cast<int>(std::min<Eigen::Index>(2, phi.rows() - 2 * i));
    out.push_back(terms.empty() ? zero_set(size) : minkowski_sum(std::move(terms)));
  }
  return out;
}

double decomposed_map_error_bound(const BlockMatrix& phi, const std::vector<LazySet>& x_blocks, double eps_x, Norm p) {
  const ColumnBlockNorms norms = column_block_norms(phi, p);
  const int b = static_cast<int>(x_blocks.size());
  if (b != phi.col_blocks()) throw Error("oracle", "dimension", "error bound: number of blocks does not match Phi");
  double sum = 0.0;
  for (int j = 0; j < b; ++j) {
    const double alpha = norms.alpha[static_cast<std::size_t>(j)];
    if (alpha > 0.0) sum += alpha * block_diameter(x_blocks[static_cast<std::size_t>(j)], p);
  }
  return (b - 1) * sum + phi.norm(p) * eps_x;
}

double DecompositionErrorReport::diameter_x_sum() const {
  double s = 0.0;
  for (double d : diameter_x) s += d;
  return s;
}

double DecompositionErrorReport::diameter_v_sum() const {
  double s = 0.0;
  for (double d : diameter_v) s += d;
  return s;
}

DecompositionErrorReport error_report(const BlockMatrix& phi, const std::vector<LazySet>& x_blocks,
                                      const std::vector<LazySet>& v_blocks, double eps_x, double eps_v, Norm p) {
  if (x_blocks.size() != v_blocks.size() || static_cast<int>(x_blocks.size()) != phi.col_blocks()) {
    throw Error("oracle", "dimension", "error_report: block counts differ");
  }
  DecompositionErrorReport r;
  r.p = p;
  r.b = static_cast<int>(x_blocks.size());
  r.norms = column_block_norms(phi, p);
  for (const auto& x : x_blocks) r.diameter_x.push_back(block_diameter(x, p));
  for (const auto& v : v_blocks) r.diameter_v.push_back(block_diameter(v, p));
  r.eps_x = eps_x;
  r.eps_v = eps_v;
  r.k_phi = 1.0;
  r.alpha_phi = phi.norm(p);
  return r;
}

double recurrence_error_bound(const DecompositionErrorReport& r, int k) {
  if (k < 0) throw Error("oracle", "invalid", "negative step index");
  const double a = r.alpha_phi;
  double geometric = 0.0;  // sum_{s=1}^{k-1} a^s
  if (k >= 2) geometric = (a == 1.0) ? static_cast<double>(k - 1) : a * (1.0 - std::pow(a, k - 1)) / (1.0 - a);
  const double x_term = r.b * r.diameter_x_sum() + r.eps_x;
  const double v_term = r.b * r.diameter_v_sum() + r.eps_v;
  return r.k_phi * (std::pow(a, k) * x_term + v_term * geometric) + r.eps_v;
}

std::optional<double> uniform_error_bound(const DecompositionErrorReport& r) {
  const double a = r.alpha_phi;
  if (!(a < 1.0)) return std::nullopt;
  const double x_term = r.b * r.diameter_x_sum() + r.eps_x;
  const double v_term = r.b * r.diameter_v_sum() + r.eps_v;
  return r.k_phi * (x_term + v_term * a / (1.0 - a)) + r.eps_v;
}

// ---------------------------------------------------------------------------
// Discrete simulation

namespace {

bool member(const LazySet& x, const Vector& point, double slack) {
  try {
    return contains(x, point, slack);
  } catch (const Error& e) {
    if (e.kind() != "unsupported") throw;
  }
  return satisfies_supports(x, point, Matrix(x.dim(), 0), slack);
}

double membership_slack(const Vector& point) { return 1e-9 * (1.0 + point.cwiseAbs().maxCoeff()); }

}  // namespace

std::vector<Vector> simulate(const DiscreteSystem& sys, const Vector& x0, const std::vector<Vector>& inputs,
                             int steps) {
  if (steps < 0) throw Error("oracle", "invalid", "negative number of steps");
  if (x0.size() != sys.dim()) throw Error("oracle", "dimension", "initial state has the wrong dimension");
  if (!member(sys.x_init, x0, membership_slack(x0))) {
    throw Error("oracle", "input", "initial state is outside X(0)");
  }
  if (steps > 0 && inputs.size() != 1 && inputs.size() < static_cast<std::size_t>(steps)) {
    throw Error("oracle", "input", "need one input per step or a single constant input");
  }
  std::vector<Vector> states{x0};
  states.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k < steps; ++k) {
    const Vector& v = inputs.size() == 1 ? inputs.front() : inputs[static_cast<std::size_t>(k)];
    if (v.size() != sys.dim()) throw Error("oracle", "dimension", "input vector has the wrong dimension");
    const LazySet& vset = sys.v.at(sys.v.is_constant() ? 0 : static_cast<std::size_t>(k));
    if (!member(vset, v, membership_slack(v))) {
      throw Error("oracle", "input", "input at step " + std::to_string(k) + " is outside V(k)");
    }
    states.push_back(sys.phi.apply(states.back()) + v);
  }
  return states;
}

}  // namespace reachdec
