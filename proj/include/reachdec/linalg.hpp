#pragma once

#include "reachdec/blocks.hpp"
#include "reachdec/sets.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <variant>
#include <vector>

namespace reachdec {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Dense or compressed-row matrix with an index of its nonzero 2x2 blocks.
/// Rows and columns are partitioned like BlockStructure (pairs, trailing
/// single index when odd).
class BlockMatrix {
 public:
  explicit BlockMatrix(Matrix dense);
  explicit BlockMatrix(SparseMatrix sparse);

  static BlockMatrix identity(Eigen::Index n, bool sparse = false);

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }
  int row_blocks() const { return static_cast<int>(index_.size()); }
  int col_blocks() const { return static_cast<int>((cols() + 1) / 2); }

  /// Exact submatrix of row-block i and column-block j.
  Matrix block(int i, int j) const;
  /// All columns of row-block i.
  Matrix row_block(int i) const;
  /// Column blocks j with a nonzero block(i, j).
  const std::vector<int>& nonzero_blocks(int i) const { return index_[static_cast<std::size_t>(i)]; }
  /// Fraction of nonzero 2x2 blocks.
  double block_density() const;

  Matrix dense() const;
  SparseMatrix sparse() const;
  const Matrix* dense_storage() const { return std::get_if<Matrix>(&storage_); }
  const SparseMatrix* sparse_storage() const { return std::get_if<SparseMatrix>(&storage_); }

  BlockMatrix to_dense() const { return BlockMatrix(dense()); }
  BlockMatrix to_sparse() const { return BlockMatrix(sparse()); }
  BlockMatrix cwise_abs() const;
  BlockMatrix transpose() const;

  Vector apply(const Vector& x) const;
  Vector apply_transpose(const Vector& y) const;
  /// rows * this.
  Matrix left_multiply(const Matrix& rows) const;

  /// Sparse times sparse stays sparse; anything else is dense.
  friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b);

  /// Induced matrix norm.
  double norm(Norm p) const;
  bool all_finite() const;

 private:
  void build_index();

  std::variant<Matrix, SparseMatrix> storage_;
  std::vector<std::vector<int>> index_;
};

/// Induced 1-, 2- or inf-norm of a dense matrix.
double matrix_norm(const Matrix& m, Norm p);

/// e^{A delta} by Pade scaling and squaring; the result is dense.
BlockMatrix exp_matrix(const BlockMatrix& a, double delta);

struct DiscretizationMatrices {
  BlockMatrix phi;
  BlockMatrix phi1;
  BlockMatrix phi2;
};

/// (e^{A delta}, Phi1(A, delta), Phi2(A, delta)) from one augmented exponential.
DiscretizationMatrices discretization_matrices(const BlockMatrix& a, double delta);

/// Maintains P = Phi^k and Q = Phi^{k+1}. Sparse inputs use sparse products
/// until the nonzero-block density of Q passes `density_threshold`, then the
/// iterator switches to dense storage.
class PowerIterator {
 public:
  explicit PowerIterator(BlockMatrix phi, double density_threshold = 0.25);

  const BlockMatrix& previous() const { return p_; }
  const BlockMatrix& current() const { return q_; }
  /// Number of advances so far.
  int advances() const { return advances_; }
  void advance();

 private:
  BlockMatrix phi_;
  BlockMatrix p_;
  BlockMatrix q_;
  double threshold_;
  int advances_ = 0;
};

struct ExpActionOptions {
  double tolerance = 1e-12;  ///< relative to |v|
  int krylov_dim = 30;
  int max_substeps = 100000;
};

struct ExpActionStats {
  int substeps = 0;
  int matvecs = 0;
  int rejections = 0;
};

/// e^{A t} v without forming e^{A t}: Arnoldi projection with an adaptive
/// subspace size (up to krylov_dim) and time-step splitting when the
/// subspace is too small for the whole interval.
Vector exp_action(const SparseMatrix& a, const Vector& v, double t, const ExpActionOptions& options = {},
                  ExpActionStats* stats = nullptr);
Vector exp_action(const Matrix& a, const Vector& v, double t, const ExpActionOptions& options = {},
                  ExpActionStats* stats = nullptr);
Vector exp_action(const BlockMatrix& a, const Vector& v, double t, const ExpActionOptions& options = {},
                  ExpActionStats* stats = nullptr);

/// x -> e^{A delta} x, evaluated by exp_action.
class ExpOperator final : public LinearOperator {
 public:
  ExpOperator(const SparseMatrix& a, double delta, ExpActionOptions options = {});
  Eigen::Index rows() const override { return a_.rows(); }
  Eigen::Index cols() const override { return a_.cols(); }
  Vector apply(const Vector& x) const override;
  Vector apply_transpose(const Vector& y) const override;
  std::string name() const override { return "exp(A*delta)"; }

 private:
  SparseMatrix a_;
  SparseMatrix at_;
  double delta_;
  ExpActionOptions options_;
};

/// x -> Phi1(A, delta) x or Phi2(A, delta) x, read from the action of the
/// augmented exponential on [0; x] (Phi1) or [0; 0; x] (Phi2).
class IntegralOperator final : public LinearOperator {
 public:
  IntegralOperator(const SparseMatrix& a, double delta, int order, ExpActionOptions options = {});
  Eigen::Index rows() const override { return n_; }
  Eigen::Index cols() const override { return n_; }
  Vector apply(const Vector& x) const override;
  Vector apply_transpose(const Vector& y) const override;
  std::string name() const override { return order_ == 1 ? "Phi1(A,delta)" : "Phi2(A,delta)"; }

 private:
  Eigen::Index n_;
  int order_;
  SparseMatrix aug_;
  SparseMatrix aug_t_;
  double delta_;
  ExpActionOptions options_;
};

/// The state transition matrix Phi of a discrete recurrence, held either
/// explicitly or as e^{A delta} evaluated through its action on vectors.
class Transition {
 public:
  explicit Transition(BlockMatrix phi);
  static Transition lazy_exponential(const SparseMatrix& a, double delta, ExpActionOptions options = {});

  bool is_explicit() const { return explicit_ != nullptr; }
  /// Throws if the transition is lazy.
  const BlockMatrix& matrix() const;
  Eigen::Index dim() const { return dim_; }

  Vector apply(const Vector& x) const;
  Vector apply_transpose(const Vector& y) const;
  /// rows * Phi.
  Matrix left_multiply(const Matrix& rows) const;
  /// Linear operator view, for lazy linear maps.
  std::shared_ptr<const LinearOperator> as_operator() const;

 private:
  Transition() = default;
  std::shared_ptr<const BlockMatrix> explicit_;
  std::shared_ptr<const ExpOperator> lazy_;
  Eigen::Index dim_ = 0;
};

}  // namespace reachdec
