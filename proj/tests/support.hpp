#pragma once

// Random instance generators and brute-force references shared by the tests.

#include "reachdec/linalg.hpp"
#include "reachdec/sets.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace testing_support {

using reachdec::HPolygon;
using reachdec::Hyperrectangle;
using reachdec::Matrix;
using reachdec::Vector;
using reachdec::Vector2;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = uniform(rng, -scale, scale);
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale).col(0);
}

inline Hyperrectangle random_box(std::mt19937_64& rng, int n, double center = 1.0, double radius = 1.0) {
  Vector r(n);
  for (int i = 0; i < n; ++i) r[i] = uniform(rng, 0.0, radius);
  return Hyperrectangle(random_vector(rng, n, center), r);
}

/// Dense matrix with induced inf-norm equal to `norm`.
inline Matrix random_with_inf_norm(std::mt19937_64& rng, int n, double norm) {
  Matrix m = random_matrix(rng, n, n);
  return m * (norm / m.cwiseAbs().rowwise().sum().maxCoeff());
}

/// Constraints with normals at jittered, equally spaced angles and offsets in
/// [0.5, 1.5]; bounded because consecutive angles differ by less than pi.
inline std::vector<HPolygon::Constraint> random_polygon_constraints(std::mt19937_64& rng, int m) {
  const double step = 2.0 * M_PI / m;
  const double shift = uniform(rng, 0.0, 2.0 * M_PI);
  const Vector2 c(uniform(rng, -2, 2), uniform(rng, -2, 2));
  std::vector<HPolygon::Constraint> cs;
  for (int i = 0; i < m; ++i) {
    const double t = shift + step * (i + uniform(rng, -0.2, 0.2));
    const Vector2 a(std::cos(t), std::sin(t));
    cs.push_back({a, a.dot(c) + uniform(rng, 0.5, 1.5)});
  }
  return cs;
}

/// max l.x over all feasible pairwise intersections of the constraint lines.
inline double vertex_enumeration_max(const std::vector<HPolygon::Constraint>& cs, const Vector2& l) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      Eigen::Matrix2d a;
      a.row(0) = cs[i].normal.transpose();
      a.row(1) = cs[j].normal.transpose();
      if (std::abs(a.determinant()) < 1e-12) continue;
      const Vector2 x = a.partialPivLu().solve(Vector2(cs[i].offset, cs[j].offset));
      bool feasible = true;
      for (const auto& c : cs) feasible = feasible && c.normal.dot(x) <= c.offset + 1e-9;
      if (feasible) best = std::max(best, l.dot(x));
    }
  }
  return best;
}

/// Truncated Taylor series sum_{i < terms} (delta A)^i / (i + shift)! * delta^shift
/// with Kahan-compensated accumulation; shift 0 gives e^{A delta}, 1 gives
/// Phi1 and 2 gives Phi2.
inline Matrix series(const Matrix& a, double delta, int shift, int terms = 50) {
  const auto n = a.rows();
  Matrix sum = Matrix::Zero(n, n);
  Matrix comp = Matrix::Zero(n, n);
  Matrix power = Matrix::Identity(n, n);  // (A delta)^i
  double factorial = 1.0;
  for (int k = 2; k <= shift; ++k) factorial *= k;
  for (int i = 0; i < terms; ++i) {
    if (i > 0) {
      power = power * (a * delta);
      factorial *= (i + shift);
    }
    const Matrix term = power / factorial * std::pow(delta, shift) - comp;
    const Matrix next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum;
}

/// Sparse n x n matrix with about `per_row` random entries per row plus a
/// negative diagonal.
inline reachdec::SparseMatrix random_sparse(std::mt19937_64& rng, int n, int per_row, double scale) {
  std::vector<Eigen::Triplet<double>> t;
  std::uniform_int_distribution<int> col(0, n - 1);
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, -uniform(rng, 0.0, scale));
    for (int k = 0; k < per_row; ++k) t.emplace_back(i, col(rng), uniform(rng, -scale, scale));
  }
  reachdec::SparseMatrix s(n, n);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

}  // namespace testing_support
