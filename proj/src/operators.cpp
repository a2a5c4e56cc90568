#include "reachdec/error.hpp"
#include "reachdec/expm.hpp"
#include "reachdec/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace reachdec {

namespace {

bool check_size(int msz, int m_max) { return msz == m_max || (msz >= 2 && (msz <= 8 || msz % 4 == 0)); }

// Local error estimate and the exponent used to rescale the step.
struct Trial {
  double err;
  double xm;
};

template <typename MatVec>
class KrylovStepper {
 public:
  KrylovStepper(MatVec mv, Eigen::Index n, double anorm, const ExpActionOptions& options, ExpActionStats& stats)
      : mv_(std::move(mv)),
        n_(n),
        anorm_(anorm),
        m_max_(static_cast<int>(std::min<Eigen::Index>(options.krylov_dim, n))),
        stats_(stats) {}

  // Advances w by e^{A tau} in place. tau may be reduced; returns the step taken.
  double step(Vector& w, double tau, double allowed_per_time, double& next_tau) {
    const double beta = w.norm();
    basis_.resize(n_, m_max_ + 1);
    h_ = Matrix::Zero(m_max_ + 2, m_max_ + 2);
    basis_.col(0) = w / beta;
    int built = 0;  // number of Arnoldi steps completed
    bool breakdown = false;
    double avnorm = 0.0;
    pending_.resize(0);

    for (;;) {
      // Extend the basis until the next size worth checking.
      while (built < m_max_ && !breakdown) {
        Vector p;
        if (pending_.size() > 0) {
          p.swap(pending_);
        } else {
          p = mv_(basis_.col(built));
          ++stats_.matvecs;
        }
        const double before = p.norm();
        for (int i = 0; i <= built; ++i) {
          const double c = basis_.col(i).dot(p);
          h_(i, built) = c;
          p -= c * basis_.col(i);
        }
        if (p.norm() < 0.7 * before) {
          for (int i = 0; i <= built; ++i) {
            const double c = basis_.col(i).dot(p);
            h_(i, built) += c;
            p -= c * basis_.col(i);
          }
        }
        const double s = p.norm();
        ++built;
        if (s <= 1e-13 * anorm_ || built == n_) {
          breakdown = true;
          break;
        }
        h_(built, built - 1) = s;
        basis_.col(built) = p / s;
        if (check_size(built, m_max_)) {
          pending_ = mv_(basis_.col(built));
          ++stats_.matvecs;
          avnorm = pending_.norm();
          break;
        }
      }

      if (breakdown) {
        const Matrix f = expm(Matrix(tau * h_.topLeftCorner(built, built)));
        w = beta * (basis_.leftCols(built) * f.col(0));
        next_tau = tau;
        return tau;
      }

      const int msz = built;
      for (;;) {
        const Trial trial = estimate(msz, tau, beta, avnorm);
        const double allowed = allowed_per_time * tau;
        if (trial.err <= 1.2 * allowed) {
          w = beta * (basis_.leftCols(msz + 1) * f_.col(0).head(msz + 1));
          if (trial.err <= 0.0) {
            next_tau = 10.0 * tau;
          } else {
            const double grow = 0.9 * std::pow(allowed / trial.err, trial.xm);
            next_tau = tau * std::clamp(grow, 0.2, 5.0);
          }
          return tau;
        }
        if (msz < m_max_) break;  // try a larger subspace first
        ++stats_.rejections;
        const double shrink = 0.9 * std::pow(allowed / trial.err, trial.xm);
        tau *= std::clamp(shrink, 0.1, 0.9);
      }
    }
  }

 private:
  Trial estimate(int msz, double tau, double beta, double avnorm) {
    Matrix hbar = Matrix::Zero(msz + 2, msz + 2);
    hbar.topLeftCorner(msz + 1, msz) = h_.topLeftCorner(msz + 1, msz);
    hbar(msz + 1, msz) = 1.0;
    f_ = expm(Matrix(tau * hbar));
    const double phi1 = std::abs(beta * f_(msz, 0));
    const double phi2 = std::abs(beta * f_(msz + 1, 0) * avnorm);
    if (!std::isfinite(phi1) || !std::isfinite(phi2)) {
      throw Error("linalg", "nonfinite", "exp_action: non-finite Krylov error estimate");
    }
    if (phi1 > 10.0 * phi2) return {phi2, 1.0 / msz};
    if (phi1 > phi2) return {phi1 * phi2 / (phi1 - phi2), 1.0 / msz};
    return {phi1, 1.0 / std::max(1, msz - 1)};
  }

  MatVec mv_;
  Eigen::Index n_;
  double anorm_;
  int m_max_;
  ExpActionStats& stats_;
  Matrix basis_;
  Matrix h_;
  Matrix f_;
  Vector pending_;  // A v_k for the newest basis vector, reused by the next Arnoldi step
};

template <typename MatVec>
Vector krylov_expv(MatVec mv, Eigen::Index n, double anorm, const Vector& v, double t,
                   const ExpActionOptions& options, ExpActionStats* stats_out) {
  ExpActionStats stats;
  if (v.size() != n) throw Error("linalg", "dimension", "exp_action: vector size does not match matrix");
  if (!v.allFinite()) throw Error("linalg", "nonfinite", "exp_action: non-finite input vector");
  const double vnorm = v.norm();
  if (t == 0.0 || anorm == 0.0 || vnorm == 0.0) {
    if (stats_out) *stats_out = stats;
    return v;
  }
  if (t < 0.0) throw Error("linalg", "invalid", "exp_action: negative time");

  KrylovStepper<MatVec> stepper(std::move(mv), n, anorm, options, stats);
  const double allowed_per_time = options.tolerance * vnorm / t;
  Vector w = v;
  double t_now = 0.0;
  double tau = t;
  while (t_now < t) {
    if (stats.substeps >= options.max_substeps) {
      throw Error("linalg", "nonconvergence",
                  "exp_action: exceeded " + std::to_string(options.max_substeps) + " substeps");
    }
    if (w.norm() == 0.0) break;
    tau = std::min(tau, t - t_now);
    double next_tau = tau;
    const double taken = stepper.step(w, tau, allowed_per_time, next_tau);
    if (!w.allFinite()) throw Error("linalg", "nonfinite", "exp_action: result overflowed");
    ++stats.substeps;
    t_now = (t - t_now - taken <= 1e-15 * t) ? t : t_now + taken;
    tau = next_tau;
  }
  if (stats_out) *stats_out = stats;
  return w;
}

double sparse_inf_norm(const SparseMatrix& a) {
  double best = 0.0;
  for (Eigen::Index row = 0; row < a.rows(); ++row) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(a, row); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

void require_square_finite(const SparseMatrix& a, const char* what) {
  if (a.rows() != a.cols()) throw Error("linalg", "dimension", std::string(what) + ": matrix is not square");
  if (!Eigen::Map<const Vector>(a.valuePtr(), a.nonZeros()).allFinite()) {
    throw Error("linalg", "nonfinite", std::string(what) + ": matrix has non-finite entries");
  }
}

}  // namespace

Vector exp_action(const SparseMatrix& a, const Vector& v, double t, const ExpActionOptions& options,
                  ExpActionStats* stats) {
  require_square_finite(a, "exp_action");
  return krylov_expv([&a](const auto& x) -> Vector { return a * x; }, a.rows(), sparse_inf_norm(a), v, t, options,
                     stats);
}

Vector exp_action(const Matrix& a, const Vector& v, double t, const ExpActionOptions& options,
                  ExpActionStats* stats) {
  if (a.rows() != a.cols()) throw Error("linalg", "dimension", "exp_action: matrix is not square");
  if (!a.allFinite()) throw Error("linalg", "nonfinite", "exp_action: matrix has non-finite entries");
  const double anorm = a.size() ? a.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  return krylov_expv([&a](const auto& x) -> Vector { return a * x; }, a.rows(), anorm, v, t, options, stats);
}

Vector exp_action(const BlockMatrix& a, const Vector& v, double t, const ExpActionOptions& options,
                  ExpActionStats* stats) {
  if (const auto* s = a.sparse_storage()) return exp_action(*s, v, t, options, stats);
  return exp_action(*a.dense_storage(), v, t, options, stats);
}

// ---------------------------------------------------------------------------

ExpOperator::ExpOperator(const SparseMatrix& a, double delta, ExpActionOptions options)
    : a_(a), at_(SparseMatrix(a.transpose())), delta_(delta), options_(options) {
  require_square_finite(a_, "ExpOperator");
  if (!(delta > 0.0)) throw Error("linalg", "invalid", "ExpOperator: step must be positive");
  a_.makeCompressed();
  at_.makeCompressed();
}

Vector ExpOperator::apply(const Vector& x) const { return exp_action(a_, x, delta_, options_); }

Vector ExpOperator::apply_transpose(const Vector& y) const { return exp_action(at_, y, delta_, options_); }

IntegralOperator::IntegralOperator(const SparseMatrix& a, double delta, int order, ExpActionOptions options)
    : n_(a.rows()), order_(order), delta_(delta), options_(options) {
  require_square_finite(a, "IntegralOperator");
  if (order != 1 && order != 2) throw Error("linalg", "invalid", "IntegralOperator: order must be 1 or 2");
  if (!(delta > 0.0)) throw Error("linalg", "invalid", "IntegralOperator: step must be positive");
  const Eigen::Index size = (order + 1) * n_;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(a.nonZeros() + order * n_));
  for (Eigen::Index row = 0; row < n_; ++row) {
    for (SparseMatrix::InnerIterator it(a, row); it; ++it) entries.emplace_back(row, it.col(), it.value());
  }
  for (int block = 0; block < order; ++block) {
    for (Eigen::Index i = 0; i < n_; ++i) entries.emplace_back(block * n_ + i, (block + 1) * n_ + i, 1.0);
  }
  aug_.resize(size, size);
  aug_.setFromTriplets(entries.begin(), entries.end());
  aug_t_ = SparseMatrix(aug_.transpose());
}

Vector IntegralOperator::apply(const Vector& x) const {
  if (x.size() != n_) throw Error("linalg", "dimension", "IntegralOperator: vector size mismatch");
  Vector z = Vector::Zero(aug_.rows());
  z.tail(n_) = x;
  return exp_action(aug_, z, delta_, options_).head(n_);
}

Vector IntegralOperator::apply_transpose(const Vector& y) const {
  if (y.size() != n_) throw Error("linalg", "dimension", "IntegralOperator: vector size mismatch");
  Vector z = Vector::Zero(aug_t_.rows());
  z.head(n_) = y;
  return exp_action(aug_t_, z, delta_, options_).tail(n_);
}

}  // namespace reachdec
