#include "reachdec/error.hpp"
#include "reachdec/expm.hpp"
#include "reachdec/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>

namespace reachdec {

BlockMatrix::BlockMatrix(Matrix dense) : storage_(std::move(dense)) { build_index(); }

BlockMatrix::BlockMatrix(SparseMatrix sparse) : storage_(std::move(sparse)) {
  std::get<SparseMatrix>(storage_).makeCompressed();
  build_index();
}

BlockMatrix BlockMatrix::identity(Eigen::Index n, bool sparse) {
  if (sparse) {
    SparseMatrix id(n, n);
    id.setIdentity();
    return BlockMatrix(std::move(id));
  }
  return BlockMatrix(Matrix(Matrix::Identity(n, n)));
}

Eigen::Index BlockMatrix::rows() const {
  return std::visit([](const auto& m) { return m.rows(); }, storage_);
}

Eigen::Index BlockMatrix::cols() const {
  return std::visit([](const auto& m) { return m.cols(); }, storage_);
}

void BlockMatrix::build_index() {
  const Eigen::Index r = rows();
  const Eigen::Index c = cols();
  const int rb = static_cast<int>((r + 1) / 2);
  const int cb = static_cast<int>((c + 1) / 2);
  index_.assign(static_cast<std::size_t>(rb), {});
  if (const auto* d = dense_storage()) {
    for (int i = 0; i < rb; ++i) {
      const Eigen::Index ri = std::min<Eigen::Index>(2, r - 2 * i);
      for (int j = 0; j < cb; ++j) {
        const Eigen::Index cj = std::min<Eigen::Index>(2, c - 2 * j);
        if ((d->block(2 * i, 2 * j, ri, cj).array() != 0.0).any()) index_[static_cast<std::size_t>(i)].push_back(j);
      }
    }
    return;
  }
  const auto& s = std::get<SparseMatrix>(storage_);
  for (Eigen::Index row = 0; row < r; ++row) {
    auto& list = index_[static_cast<std::size_t>(row / 2)];
    for (SparseMatrix::InnerIterator it(s, row); it; ++it) {
      if (it.value() != 0.0) list.push_back(static_cast<int>(it.col() / 2));
    }
  }
  for (auto& list : index_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

Matrix BlockMatrix::block(int i, int j) const {
  const Eigen::Index r0 = 2 * i;
  const Eigen::Index c0 = 2 * j;
  const Eigen::Index ri = std::min<Eigen::Index>(2, rows() - r0);
  const Eigen::Index cj = std::min<Eigen::Index>(2, cols() - c0);
  if (const auto* d = dense_storage()) return d->block(r0, c0, ri, cj);
  Matrix out = Matrix::Zero(ri, cj);
  const auto& s = std::get<SparseMatrix>(storage_);
  for (Eigen::Index k = 0; k < ri; ++k) {
    for (SparseMatrix::InnerIterator it(s, r0 + k); it; ++it) {
      if (it.col() >= c0 && it.col() < c0 + cj) out(k, it.col() - c0) = it.value();
    }
  }
  return out;
}

Matrix BlockMatrix::row_block(int i) const {
  const Eigen::Index r0 = 2 * i;
  const Eigen::Index ri = std::min<Eigen::Index>(2, rows() - r0);
  if (const auto* d = dense_storage()) return d->middleRows(r0, ri);
  Matrix out = Matrix::Zero(ri, cols());
  const auto& s = std::get<SparseMatrix>(storage_);
  for (Eigen::Index k = 0; k < ri; ++k) {
    for (SparseMatrix::InnerIterator it(s, r0 + k); it; ++it) out(k, it.col()) = it.value();
  }
  return out;
}

double BlockMatrix::block_density() const {
  std::size_t nonzero = 0;
  for (const auto& list : index_) nonzero += list.size();
  const double total = static_cast<double>(row_blocks()) * col_blocks();
  return total == 0.0 ? 0.0 : static_cast<double>(nonzero) / total;
}

Matrix BlockMatrix::dense() const {
  if (const auto* d = dense_storage()) return *d;
  return Matrix(std::get<SparseMatrix>(storage_));
}

SparseMatrix BlockMatrix::sparse() const {
  if (const auto* s = sparse_storage()) return *s;
  return std::get<Matrix>(storage_).sparseView(0.0, 0.0);
}

BlockMatrix BlockMatrix::cwise_abs() const {
  if (const auto* d = dense_storage()) return BlockMatrix(Matrix(d->cwiseAbs()));
  return BlockMatrix(SparseMatrix(std::get<SparseMatrix>(storage_).cwiseAbs()));
}

BlockMatrix BlockMatrix::transpose() const {
  if (const auto* d = dense_storage()) return BlockMatrix(Matrix(d->transpose()));
  return BlockMatrix(SparseMatrix(std::get<SparseMatrix>(storage_).transpose()));
}

Vector BlockMatrix::apply(const Vector& x) const {
  return std::visit([&](const auto& m) -> Vector { return m * x; }, storage_);
}

Vector BlockMatrix::apply_transpose(const Vector& y) const {
  return std::visit([&](const auto& m) -> Vector { return m.transpose() * y; }, storage_);
}

Matrix BlockMatrix::left_multiply(const Matrix& r) const {
  return std::visit([&](const auto& m) -> Matrix { return r * m; }, storage_);
}

BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error("linalg", "dimension",
                "matrix product: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  const auto* as = a.sparse_storage();
  const auto* bs = b.sparse_storage();
  if (as && bs) return BlockMatrix(SparseMatrix(*as * *bs));
  if (as) return BlockMatrix(Matrix(*as * *b.dense_storage()));
  if (bs) return BlockMatrix(Matrix(*a.dense_storage() * *bs));
  return BlockMatrix(Matrix(*a.dense_storage() * *b.dense_storage()));
}

double matrix_norm(const Matrix& m, Norm p) {
  if (m.size() == 0) return 0.0;
  switch (p) {
    case Norm::One:
      return m.cwiseAbs().colwise().sum().maxCoeff();
    case Norm::Inf:
      return m.cwiseAbs().rowwise().sum().maxCoeff();
    case Norm::Two:
      return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
  }
  return 0.0;
}

double BlockMatrix::norm(Norm p) const {
  if (const auto* d = dense_storage()) return matrix_norm(*d, p);
  const auto& s = std::get<SparseMatrix>(storage_);
  if (p == Norm::Inf) {
    double best = 0.0;
    for (Eigen::Index row = 0; row < s.rows(); ++row) {
      double sum = 0.0;
      for (SparseMatrix::InnerIterator it(s, row); it; ++it) sum += std::abs(it.value());
      best = std::max(best, sum);
    }
    return best;
  }
  if (p == Norm::One) {
    Vector sums = Vector::Zero(s.cols());
    for (Eigen::Index row = 0; row < s.rows(); ++row) {
      for (SparseMatrix::InnerIterator it(s, row); it; ++it) sums[it.col()] += std::abs(it.value());
    }
    return sums.size() ? sums.maxCoeff() : 0.0;
  }
  return matrix_norm(dense(), p);
}

bool BlockMatrix::all_finite() const {
  if (const auto* d = dense_storage()) return d->allFinite();
  const auto& s = std::get<SparseMatrix>(storage_);
  return Eigen::Map<const Vector>(s.valuePtr(), s.nonZeros()).allFinite();
}

// ---------------------------------------------------------------------------

BlockMatrix exp_matrix(const BlockMatrix& a, double delta) {
  if (a.rows() != a.cols()) throw Error("linalg", "dimension", "exp_matrix: matrix is not square");
  if (!(delta > 0.0)) throw Error("linalg", "invalid", "exp_matrix: step must be positive");
  if (!a.all_finite()) throw Error("linalg", "nonfinite", "exp_matrix: matrix has non-finite entries");
  return BlockMatrix(expm(Matrix(a.dense() * delta)));
}

DiscretizationMatrices discretization_matrices(const BlockMatrix& a, double delta) {
  if (a.rows() != a.cols()) throw Error("linalg", "dimension", "discretization_matrices: matrix is not square");
  if (!(delta > 0.0)) throw Error("linalg", "invalid", "discretization_matrices: step must be positive");
  if (!a.all_finite()) throw Error("linalg", "nonfinite", "discretization_matrices: non-finite entries");
  auto m = integral_matrices(a.dense(), delta);
  return {BlockMatrix(std::move(m.phi)), BlockMatrix(std::move(m.phi1)), BlockMatrix(std::move(m.phi2))};
}

// ---------------------------------------------------------------------------

PowerIterator::PowerIterator(BlockMatrix phi, double density_threshold)
    : phi_(std::move(phi)),
      p_(BlockMatrix::identity(phi_.rows(), phi_.is_sparse())),
      q_(phi_),
      threshold_(density_threshold) {
  if (phi_.rows() != phi_.cols()) throw Error("linalg", "dimension", "PowerIterator: matrix is not square");
}

void PowerIterator::advance() {
  BlockMatrix next = q_ * phi_;
  if (next.is_sparse() && next.block_density() > threshold_) next = next.to_dense();
  if (!next.all_finite()) {
    throw Error("linalg", "nonfinite",
                "matrix power overflowed at exponent " + std::to_string(advances_ + 2));
  }
  p_ = std::move(q_);
  q_ = std::move(next);
  ++advances_;
}

// ---------------------------------------------------------------------------

Transition::Transition(BlockMatrix phi)
    : explicit_(std::make_shared<const BlockMatrix>(std::move(phi))), dim_(explicit_->rows()) {
  if (explicit_->rows() != explicit_->cols()) throw Error("linalg", "dimension", "transition matrix is not square");
}

Transition Transition::lazy_exponential(const SparseMatrix& a, double delta, ExpActionOptions options) {
  Transition t;
  t.lazy_ = std::make_shared<const ExpOperator>(a, delta, options);
  t.dim_ = a.rows();
  return t;
}

const BlockMatrix& Transition::matrix() const {
  if (!explicit_) throw Error("linalg", "unsupported", "transition is held as a lazy exponential");
  return *explicit_;
}

Vector Transition::apply(const Vector& x) const {
  return explicit_ ? explicit_->apply(x) : lazy_->apply(x);
}

Vector Transition::apply_transpose(const Vector& y) const {
  return explicit_ ? explicit_->apply_transpose(y) : lazy_->apply_transpose(y);
}

Matrix Transition::left_multiply(const Matrix& rows) const {
  return explicit_ ? explicit_->left_multiply(rows) : lazy_->left_multiply(rows);
}

namespace {

class MatrixOperator final : public LinearOperator {
 public:
  explicit MatrixOperator(std::shared_ptr<const BlockMatrix> m) : m_(std::move(m)) {}
  Eigen::Index rows() const override { return m_->rows(); }
  Eigen::Index cols() const override { return m_->cols(); }
  Vector apply(const Vector& x) const override { return m_->apply(x); }
  Vector apply_transpose(const Vector& y) const override { return m_->apply_transpose(y); }
  Matrix left_multiply(const Matrix& r) const override { return m_->left_multiply(r); }
  std::string name() const override { return "Phi"; }

 private:
  std::shared_ptr<const BlockMatrix> m_;
};

}  // namespace

std::shared_ptr<const LinearOperator> Transition::as_operator() const {
  if (explicit_) return std::make_shared<const MatrixOperator>(explicit_);
  return lazy_;
}

}  // namespace reachdec
