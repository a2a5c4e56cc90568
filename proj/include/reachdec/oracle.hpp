#pragma once

#include "reachdec/blocks.hpp"
#include "reachdec/discretize.hpp"
#include "reachdec/linalg.hpp"
#include "reachdec/sets.hpp"

#include <optional>
#include <random>
#include <vector>

namespace reachdec {

// ---------------------------------------------------------------------------
// Directions

/// `count` unit vectors at equally spaced angles in the plane.
Matrix circle_directions(int count);

/// Unit vectors from a Halton sequence mapped to the sphere by Box-Muller,
/// preceded by +-e_i. Columns are directions. Deterministic.
Matrix sphere_directions(int dim, int count);

/// Independent standard-normal directions scaled to unit 2-norm.
Matrix random_directions(int dim, int count, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Non-decomposed reference

/// supports(k, d) = rho_{X(k)}(directions.col(d)) for k = 0..steps-1, from
/// X(k) = Phi^k X(0) + W(k) evaluated lazily without any collapse.
Matrix reach_nondecomposed(const DiscreteSystem& sys, int steps, const Matrix& directions);

/// X(k) as a lazy set with Phi^k formed explicitly. Needs an explicit Phi.
LazySet nondecomposed_set(const DiscreteSystem& sys, int k);

/// max over the directions of (rho_Y(l) - rho_X(l)) / |l|_q, q the dual
/// exponent of p. A lower bound on d_H^p(X, Y) for X inside Y. Throws
/// Error("oracle", "containment") when some gap is below -1e-9.
double hausdorff_estimate(const LazySet& x, const LazySet& y, Norm p, const Matrix& directions);

// ---------------------------------------------------------------------------
// Analytic bounds

/// Smallest D with rho(d) + rho(-d) <= |d|_q D. Exact for p in {1, inf};
/// for p = 2 a sampled maximum inflated to stay an upper bound.
double block_diameter(const LazySet& x, Norm p);

/// Per column-block j: the largest and second largest |Phi_ij|_p over i.
struct ColumnBlockNorms {
  std::vector<int> q;          ///< row-block holding the largest norm
  std::vector<double> alpha;   ///< second largest norm (0 when b = 1)
};
ColumnBlockNorms column_block_norms(const BlockMatrix& phi, Norm p);

/// Blockwise image sum_j Phi_ij X_j, one lazy set per row-block i.
std::vector<LazySet> decomposed_image(const BlockMatrix& phi, const std::vector<LazySet>& blocks);

/// (b-1) sum_j alpha_j Delta_j + |Phi|_p eps_x.
double decomposed_map_error_bound(const BlockMatrix& phi, const std::vector<LazySet>& x_blocks, double eps_x,
                                  Norm p = Norm::Inf);

/// Quantities entering the recurrence error bound.
/// Constants satisfy |Phi^k|_p <= k_phi alpha_phi^k.
struct DecompositionErrorReport {
  Norm p = Norm::Inf;
  int b = 0;
  ColumnBlockNorms norms;
  std::vector<double> diameter_x;  ///< Delta^x_j of the decomposed X(0)
  std::vector<double> diameter_v;  ///< Delta^v_j of the decomposed V
  double eps_x = 0.0;
  double eps_v = 0.0;
  double k_phi = 1.0;
  double alpha_phi = 0.0;

  double diameter_x_sum() const;
  double diameter_v_sum() const;
};

/// Report with k_phi = 1 and alpha_phi = |Phi|_p.
DecompositionErrorReport error_report(const BlockMatrix& phi, const std::vector<LazySet>& x_blocks,
                                      const std::vector<LazySet>& v_blocks, double eps_x, double eps_v,
                                      Norm p = Norm::Inf);

/// Bound on d_H^p(X_hat(k), X(k)) for constant inputs. The geometric factor is
/// sum_{s=1}^{k-1} alpha^s: empty for k <= 1 and k - 1 when alpha = 1.
double recurrence_error_bound(const DecompositionErrorReport& report, int k);

/// Bound valid for every k; only when alpha_phi < 1.
std::optional<double> uniform_error_bound(const DecompositionErrorReport& report);

// ---------------------------------------------------------------------------
// Simulation

/// x(k+1) = Phi x(k) + v(k), returning x(0..steps). inputs holds v(k) (one
/// per step, or a single vector used throughout); v(k) must lie in V(k).
std::vector<Vector> simulate(const DiscreteSystem& sys, const Vector& x0, const std::vector<Vector>& inputs,
                             int steps);

/// Solution of x' = A x + B u for constant u at the given increasing times,
/// by adaptive Dormand-Prince integration (tolerance 1e-10).
std::vector<Vector> simulate(const ContinuousSystem& sys, const Vector& x0, const Vector& u,
                             const std::vector<double>& times);

}  // namespace reachdec
