#include "reachdec/sets.hpp"

#include "reachdec/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace reachdec {

namespace {

[[noreturn]] void dimension_error(const std::string& message) {
  throw Error("sets", "dimension", message);
}

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

// ---------------------------------------------------------------------------
// Concrete sets

Hyperrectangle::Hyperrectangle(Vector center, Vector radius)
    : center_(std::move(center)), radius_(std::move(radius)) {
  if (center_.size() != radius_.size()) {
    dimension_error("Hyperrectangle: center has dimension " + std::to_string(center_.size()) +
                    " but radius has dimension " + std::to_string(radius_.size()));
  }
  if (!all_finite(center_) || !all_finite(radius_)) {
    throw Error("sets", "unbounded", "Hyperrectangle: non-finite center or radius");
  }
  if ((radius_.array() < 0.0).any()) {
    throw Error("sets", "invalid", "Hyperrectangle: negative radius");
  }
}

Hyperrectangle Hyperrectangle::from_bounds(const Vector& low, const Vector& high) {
  if (low.size() != high.size()) {
    dimension_error("Hyperrectangle: bounds of different dimension");
  }
  if ((high.array() < low.array()).any()) {
    throw Error("sets", "invalid", "Hyperrectangle: lower bound exceeds upper bound");
  }
  return Hyperrectangle((low + high) / 2.0, (high - low) / 2.0);
}

Norm dual(Norm p) {
  switch (p) {
    case Norm::One:
      return Norm::Inf;
    case Norm::Two:
      return Norm::Two;
    case Norm::Inf:
      return Norm::One;
  }
  return Norm::Two;
}

double norm(const Vector& v, Norm p) {
  switch (p) {
    case Norm::One:
      return v.lpNorm<1>();
    case Norm::Two:
      return v.norm();
    case Norm::Inf:
      return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  return v.norm();
}

std::string to_string(Norm p) {
  switch (p) {
    case Norm::One:
      return "1";
    case Norm::Two:
      return "2";
    case Norm::Inf:
      return "inf";
  }
  return "?";
}

BallP::BallP(Vector center, double radius, Norm p)
    : center_(std::move(center)), radius_(radius), p_(p) {
  if (!std::isfinite(radius_) || !all_finite(center_)) {
    throw Error("sets", "unbounded", "BallP: non-finite center or radius");
  }
  if (radius_ < 0.0) throw Error("sets", "invalid", "BallP: negative radius");
}

// ---------------------------------------------------------------------------
// LazySet

LazySet::LazySet(Hyperrectangle h)
    : node_(std::make_shared<const LazySetNode>(LazySetNode{std::move(h)})),
      dim_(std::get<Hyperrectangle>(node_->value).dim()) {}

LazySet::LazySet(BallP b)
    : node_(std::make_shared<const LazySetNode>(LazySetNode{std::move(b)})),
      dim_(std::get<BallP>(node_->value).dim()) {}

LazySet::LazySet(HPolygon p)
    : node_(std::make_shared<const LazySetNode>(LazySetNode{std::move(p)})), dim_(2) {}

LazySet::LazySet(Singleton s)
    : node_(std::make_shared<const LazySetNode>(LazySetNode{std::move(s)})),
      dim_(std::get<Singleton>(node_->value).dim()) {}

LazySet make_lazy(LazySetNode node, int dim) {
  return LazySet(std::make_shared<const LazySetNode>(std::move(node)), dim);
}

std::string LazySet::describe() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Hyperrectangle>) out << "Hyperrectangle";
        if constexpr (std::is_same_v<T, BallP>) out << "BallP(p=" << to_string(n.p()) << ")";
        if constexpr (std::is_same_v<T, HPolygon>) out << "HPolygon(" << n.size() << " constraints)";
        if constexpr (std::is_same_v<T, Singleton>) out << "Singleton";
        if constexpr (std::is_same_v<T, LinearMap>)
          out << "LinearMap(" << n.matrix.rows() << "x" << n.matrix.cols() << ")";
        if constexpr (std::is_same_v<T, OperatorMap>) out << "OperatorMap(" << n.op->name() << ")";
        if constexpr (std::is_same_v<T, MinkowskiSum>) out << "MinkowskiSum(" << n.terms.size() << " terms)";
        if constexpr (std::is_same_v<T, CartesianProduct>)
          out << "CartesianProduct(" << n.factors.size() << " factors)";
        if constexpr (std::is_same_v<T, ConvexHullPair>) out << "ConvexHullPair";
      },
      node_->value);
  out << "[dim " << dim_ << "]";
  return out.str();
}

Matrix LinearOperator::left_multiply(const Matrix& r) const {
  Matrix out(r.rows(), cols());
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    out.row(i) = apply_transpose(r.row(i).transpose()).transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Factories

LazySet linear_map(const Matrix& m, const LazySet& x) {
  if (m.cols() != x.dim()) {
    dimension_error("LinearMap: matrix has " + std::to_string(m.cols()) +
                    " columns but operand " + x.describe() + " has dimension " +
                    std::to_string(x.dim()));
  }
  if (const auto* s = x.get_if<Singleton>()) return Singleton(m * s->point());
  if (const auto* inner = x.get_if<LinearMap>()) {
    // Fold when the product is no larger than the inner matrix.
    if (m.rows() <= m.cols()) return linear_map(Matrix(m * inner->matrix), inner->set);
  }
  if (const auto* inner = x.get_if<OperatorMap>()) {
    if (4 * m.rows() <= m.cols()) return linear_map(inner->op->left_multiply(m), inner->set);
  }
  return make_lazy(LazySetNode{LinearMap{m, x}}, static_cast<int>(m.rows()));
}

LazySet linear_map(std::shared_ptr<const LinearOperator> op, const LazySet& x) {
  if (op->cols() != x.dim()) {
    dimension_error("OperatorMap(" + op->name() + "): operator has " +
                    std::to_string(op->cols()) + " columns but operand " + x.describe() +
                    " has dimension " + std::to_string(x.dim()));
  }
  const int rows = static_cast<int>(op->rows());
  return make_lazy(LazySetNode{OperatorMap{std::move(op), x}}, rows);
}

LazySet scale(double lambda, const LazySet& x) {
  if (const auto* h = x.get_if<Hyperrectangle>()) {
    return Hyperrectangle(lambda * h->center(), std::abs(lambda) * h->radius());
  }
  if (const auto* b = x.get_if<BallP>()) {
    return BallP(lambda * b->center(), std::abs(lambda) * b->radius(), b->p());
  }
  if (const auto* s = x.get_if<Singleton>()) return Singleton(lambda * s->point());
  if (const auto* m = x.get_if<LinearMap>()) {
    return make_lazy(LazySetNode{LinearMap{lambda * m->matrix, m->set}}, x.dim());
  }
  return make_lazy(LazySetNode{LinearMap{lambda * Matrix::Identity(x.dim(), x.dim()), x}}, x.dim());
}

LazySet minkowski_sum(const LazySet& x, const LazySet& y) {
  return minkowski_sum(std::vector<LazySet>{x, y});
}

LazySet minkowski_sum(std::vector<LazySet> terms) {
  if (terms.empty()) dimension_error("MinkowskiSum: no terms");
  const int dim = terms.front().dim();
  std::vector<LazySet> flat;
  flat.reserve(terms.size());
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i].dim() != dim) {
      dimension_error("MinkowskiSum: term 0 " + terms.front().describe() + " and term " +
                      std::to_string(i) + " " + terms[i].describe() + " differ in dimension");
    }
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (const auto* inner = terms[i].get_if<MinkowskiSum>()) {
      flat.insert(flat.end(), inner->terms.begin(), inner->terms.end());
    } else {
      flat.push_back(std::move(terms[i]));
    }
  }
  if (flat.size() == 1) return flat.front();
  return make_lazy(LazySetNode{MinkowskiSum{std::move(flat)}}, dim);
}

LazySet cartesian_product(std::vector<LazySet> factors) {
  if (factors.empty()) dimension_error("CartesianProduct: no factors");
  int dim = 0;
  for (const auto& f : factors) dim += f.dim();
  if (factors.size() == 1) return factors.front();
  return make_lazy(LazySetNode{CartesianProduct{std::move(factors)}}, dim);
}

LazySet convex_hull(const LazySet& x, const LazySet& y) {
  if (x.dim() != y.dim()) {
    dimension_error("ConvexHullPair: " + x.describe() + " and " + y.describe() +
                    " differ in dimension");
  }
  return make_lazy(LazySetNode{ConvexHullPair{x, y}}, x.dim());
}

LazySet zero_set(int dim) { return Singleton(Vector::Zero(dim)); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

void check_direction(const LazySet& x, const Vector& d) {
  if (d.size() != x.dim()) {
    dimension_error("support evaluation: direction has dimension " + std::to_string(d.size()) +
                    " but set " + x.describe() + " has dimension " + std::to_string(x.dim()));
  }
}

double sign_or_one(double v) { return v < 0.0 ? -1.0 : 1.0; }

Vector ball_support_vector(const BallP& b, const Vector& d) {
  Vector out = b.center();
  switch (b.p()) {
    case Norm::Two: {
      const double nd = d.norm();
      if (nd > 0.0) out += b.radius() / nd * d;
      break;
    }
    case Norm::Inf:
      for (Eigen::Index i = 0; i < d.size(); ++i) out[i] += sign_or_one(d[i]) * b.radius();
      break;
    case Norm::One: {
      Eigen::Index idx = 0;
      if (d.size() > 0) {
        d.cwiseAbs().maxCoeff(&idx);
        out[idx] += sign_or_one(d[idx]) * b.radius();
      }
      break;
    }
  }
  return out;
}

double support_impl(const LazySet& x, const Vector& d);
Vector support_vector_impl(const LazySet& x, const Vector& d);

double support_impl(const LazySet& x, const Vector& d) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Hyperrectangle>) {
          return d.dot(n.center()) + d.cwiseAbs().dot(n.radius());
        } else if constexpr (std::is_same_v<T, BallP>) {
          return d.dot(n.center()) + n.radius() * norm(d, dual(n.p()));
        } else if constexpr (std::is_same_v<T, HPolygon>) {
          return d.dot(polygon_support_vector(n, d.head<2>()));
        } else if constexpr (std::is_same_v<T, Singleton>) {
          return d.dot(n.point());
        } else if constexpr (std::is_same_v<T, LinearMap>) {
          return support_impl(n.set, n.matrix.transpose() * d);
        } else if constexpr (std::is_same_v<T, OperatorMap>) {
          return support_impl(n.set, n.op->apply_transpose(d));
        } else if constexpr (std::is_same_v<T, MinkowskiSum>) {
          double total = 0.0;
          for (const auto& t : n.terms) total += support_impl(t, d);
          return total;
        } else if constexpr (std::is_same_v<T, CartesianProduct>) {
          double total = 0.0;
          Eigen::Index offset = 0;
          for (const auto& f : n.factors) {
            total += support_impl(f, d.segment(offset, f.dim()));
            offset += f.dim();
          }
          return total;
        } else {
          static_assert(std::is_same_v<T, ConvexHullPair>);
          return std::max(support_impl(n.first, d), support_impl(n.second, d));
        }
      },
      x.node().value);
}

Vector support_vector_impl(const LazySet& x, const Vector& d) {
  return std::visit(
      [&](const auto& n) -> Vector {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Hyperrectangle>) {
          Vector out = n.center();
          for (Eigen::Index i = 0; i < d.size(); ++i) out[i] += sign_or_one(d[i]) * n.radius()[i];
          return out;
        } else if constexpr (std::is_same_v<T, BallP>) {
          return ball_support_vector(n, d);
        } else if constexpr (std::is_same_v<T, HPolygon>) {
          return polygon_support_vector(n, d.head<2>());
        } else if constexpr (std::is_same_v<T, Singleton>) {
          return n.point();
        } else if constexpr (std::is_same_v<T, LinearMap>) {
          return n.matrix * support_vector_impl(n.set, n.matrix.transpose() * d);
        } else if constexpr (std::is_same_v<T, OperatorMap>) {
          return n.op->apply(support_vector_impl(n.set, n.op->apply_transpose(d)));
        } else if constexpr (std::is_same_v<T, MinkowskiSum>) {
          Vector total = Vector::Zero(x.dim());
          for (const auto& t : n.terms) total += support_vector_impl(t, d);
          return total;
        } else if constexpr (std::is_same_v<T, CartesianProduct>) {
          Vector out(x.dim());
          Eigen::Index offset = 0;
          for (const auto& f : n.factors) {
            out.segment(offset, f.dim()) = support_vector_impl(f, d.segment(offset, f.dim()));
            offset += f.dim();
          }
          return out;
        } else {
          static_assert(std::is_same_v<T, ConvexHullPair>);
          Vector a = support_vector_impl(n.first, d);
          Vector b = support_vector_impl(n.second, d);
          return d.dot(a) >= d.dot(b) ? a : b;
        }
      },
      x.node().value);
}

}  // namespace

double support_function(const LazySet& x, const Vector& direction) {
  check_direction(x, direction);
  const double value = support_impl(x, direction);
  if (!std::isfinite(value)) {
    throw Error("sets", "unbounded", "support function of " + x.describe() + " is not finite");
  }
  return value;
}

Vector support_vector(const LazySet& x, const Vector& direction) {
  check_direction(x, direction);
  Vector v = support_vector_impl(x, direction);
  if (!v.allFinite()) {
    throw Error("sets", "unbounded", "support vector of " + x.describe() + " is not finite");
  }
  return v;
}

Hyperrectangle symmetric_interval_hull(const LazySet& x) {
  const int n = x.dim();
  if (const auto* h = x.get_if<Hyperrectangle>()) {
    return Hyperrectangle(Vector::Zero(n), h->center().cwiseAbs() + h->radius());
  }
  Vector radius(n);
  Vector e = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    e[i] = 1.0;
    const double hi = support_function(x, e);
    e[i] = -1.0;
    const double lo = support_function(x, e);
    e[i] = 0.0;
    radius[i] = std::max(std::abs(hi), std::abs(lo));
  }
  return Hyperrectangle(Vector::Zero(n), radius);
}

bool contains(const LazySet& x, const Vector& point, double slack) {
  if (point.size() != x.dim()) {
    dimension_error("contains: point has dimension " + std::to_string(point.size()) +
                    " but set " + x.describe() + " has dimension " + std::to_string(x.dim()));
  }
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Hyperrectangle>) {
          return ((point - n.center()).cwiseAbs() - n.radius()).maxCoeff() <= slack;
        } else if constexpr (std::is_same_v<T, BallP>) {
          return norm(point - n.center(), n.p()) <= n.radius() + slack;
        } else if constexpr (std::is_same_v<T, HPolygon>) {
          return n.contains(point.head<2>(), slack);
        } else if constexpr (std::is_same_v<T, Singleton>) {
          return (point - n.point()).cwiseAbs().maxCoeff() <= slack;
        } else if constexpr (std::is_same_v<T, CartesianProduct>) {
          Eigen::Index offset = 0;
          for (const auto& f : n.factors) {
            if (!contains(f, point.segment(offset, f.dim()), slack)) return false;
            offset += f.dim();
          }
          return true;
        } else {
          throw Error("sets", "unsupported",
                      "exact membership is not available for " + x.describe());
        }
      },
      x.node().value);
}

bool satisfies_supports(const LazySet& x, const Vector& point, const Matrix& directions,
                        double slack) {
  const int n = x.dim();
  Vector e = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (double s : {1.0, -1.0}) {
      e[i] = s;
      if (e.dot(point) > support_function(x, e) + slack) return false;
    }
    e[i] = 0.0;
  }
  for (Eigen::Index j = 0; j < directions.cols(); ++j) {
    const Vector d = directions.col(j);
    if (d.dot(point) > support_function(x, d) + slack) return false;
  }
  return true;
}

}  // namespace reachdec
