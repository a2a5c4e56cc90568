#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace reachdec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector2 = Eigen::Vector2d;

// ---------------------------------------------------------------------------
// Concrete sets
// ---------------------------------------------------------------------------

/// Axis-aligned box, center ± radius.
class Hyperrectangle {
 public:
  Hyperrectangle(Vector center, Vector radius);
  static Hyperrectangle from_bounds(const Vector& low, const Vector& high);

  int dim() const { return static_cast<int>(center_.size()); }
  const Vector& center() const { return center_; }
  const Vector& radius() const { return radius_; }
  Vector low() const { return center_ - radius_; }
  Vector high() const { return center_ + radius_; }

 private:
  Vector center_;
  Vector radius_;
};

enum class Norm { One, Two, Inf };

/// Dual exponent of a p-norm: 1 <-> inf, 2 <-> 2.
Norm dual(Norm p);
double norm(const Vector& v, Norm p);
std::string to_string(Norm p);

/// Ball of the 1-, 2- or inf-norm.
class BallP {
 public:
  BallP(Vector center, double radius, Norm p);

  int dim() const { return static_cast<int>(center_.size()); }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  Norm p() const { return p_; }

 private:
  Vector center_;
  double radius_;
  Norm p_;
};

class Singleton {
 public:
  explicit Singleton(Vector point) : point_(std::move(point)) {}
  int dim() const { return static_cast<int>(point_.size()); }
  const Vector& point() const { return point_; }

 private:
  Vector point_;
};

/// Counter-clockwise angular order on nonzero plane directions, angles taken
/// in (-pi, pi]. Uses half-plane classification plus a cross product.
bool angular_less(const Vector2& a, const Vector2& b);

/// Bounded polygon in constraint form. The constructor normalizes normals to
/// unit length, sorts them in angular order, drops redundant constraints and
/// rejects empty or unbounded input. vertex(i) is the intersection of the
/// boundary lines of constraints i and i+1 (cyclic).
class HPolygon {
 public:
  struct Constraint {
    Vector2 normal;
    double offset;
  };

  explicit HPolygon(std::vector<Constraint> constraints);

  int dim() const { return 2; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Vector2>& vertices() const { return vertices_; }
  std::size_t size() const { return constraints_.size(); }

  bool contains(const Vector2& x, double slack = 0.0) const;

 private:
  std::vector<Constraint> constraints_;
  std::vector<Vector2> vertices_;
};

/// Support vector of a polygon by binary search over its angular order,
/// O(log m). Returns the vertex shared by the two constraints whose normals
/// bracket `direction`.
Vector2 polygon_support_vector(const HPolygon& polygon, const Vector2& direction);

// ---------------------------------------------------------------------------
// Lazy sets
// ---------------------------------------------------------------------------

/// Matrix-free linear map x -> Mx, used for operators that are too large to
/// form explicitly (for instance the action of a matrix exponential).
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual Vector apply(const Vector& x) const = 0;
  virtual Vector apply_transpose(const Vector& y) const = 0;
  virtual std::string name() const = 0;

  /// Returns R * M for a short-and-wide R.
  virtual Matrix left_multiply(const Matrix& r) const;
};

struct LazySetNode;

/// Immutable handle to a (possibly symbolic) convex set. Copies share the
/// underlying tree.
class LazySet {
 public:
  LazySet(Hyperrectangle h);
  LazySet(BallP b);
  LazySet(HPolygon p);
  LazySet(Singleton s);

  int dim() const { return dim_; }
  const LazySetNode& node() const { return *node_; }

  template <typename T>
  const T* get_if() const;

  /// Short description of the root node, used in diagnostics.
  std::string describe() const;

 private:
  friend LazySet make_lazy(LazySetNode node, int dim);
  LazySet(std::shared_ptr<const LazySetNode> node, int dim) : node_(std::move(node)), dim_(dim) {}

  std::shared_ptr<const LazySetNode> node_;
  int dim_;
};

struct LinearMap {
  Matrix matrix;
  LazySet set;
};

struct OperatorMap {
  std::shared_ptr<const LinearOperator> op;
  LazySet set;
};

struct MinkowskiSum {
  std::vector<LazySet> terms;
};

struct CartesianProduct {
  std::vector<LazySet> factors;
};

struct ConvexHullPair {
  LazySet first;
  LazySet second;
};

struct LazySetNode {
  std::variant<Hyperrectangle, BallP, HPolygon, Singleton, LinearMap, OperatorMap, MinkowskiSum,
               CartesianProduct, ConvexHullPair>
      value;
};

/// Wraps a node; checks nothing. Prefer the factories below.
LazySet make_lazy(LazySetNode node, int dim);

template <typename T>
const T* LazySet::get_if() const {
  return std::get_if<T>(&node_->value);
}

// Combinator factories. All validate dimensions and throw Error("sets",
// "dimension") naming the node on mismatch.

/// M X. Nested maps are folded into one matrix when that shrinks the work,
/// singletons are mapped eagerly.
LazySet linear_map(const Matrix& m, const LazySet& x);
LazySet linear_map(std::shared_ptr<const LinearOperator> op, const LazySet& x);
LazySet scale(double lambda, const LazySet& x);
LazySet minkowski_sum(const LazySet& x, const LazySet& y);
LazySet minkowski_sum(std::vector<LazySet> terms);
LazySet cartesian_product(std::vector<LazySet> factors);
LazySet convex_hull(const LazySet& x, const LazySet& y);
LazySet zero_set(int dim);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double support_function(const LazySet& x, const Vector& direction);
Vector support_vector(const LazySet& x, const Vector& direction);

/// Smallest origin-centred box containing x.
Hyperrectangle symmetric_interval_hull(const LazySet& x);

/// Membership for concrete sets and Cartesian products of them; slack is an
/// absolute tolerance on every constraint.
bool contains(const LazySet& x, const Vector& point, double slack = 0.0);

/// Necessary membership condition for arbitrary lazy sets: checks
/// d.x <= rho(d) + slack on the coordinate directions and the given columns.
bool satisfies_supports(const LazySet& x, const Vector& point, const Matrix& directions,
                        double slack);

}  // namespace reachdec
