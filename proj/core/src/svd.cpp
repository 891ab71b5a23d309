#include "labelvec/svd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "labelvec/error.hpp"
#include "labelvec/random.hpp"

namespace labelvec {

namespace {

void check_rank(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank) {
  if (rank < 1) throw InputError("svd rank must be positive");
  if (rank > std::min(rows, cols)) {
    throw InputError("svd rank " + std::to_string(rank) + " exceeds min(" + std::to_string(rows) + ", " +
                     std::to_string(cols) + ")");
  }
}

void fix_signs(TruncatedSvd& svd) {
  for (Eigen::Index j = 0; j < svd.left.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < svd.left.rows(); ++i) {
      const double mag = std::abs(svd.left(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (svd.left(arg, j) < 0.0) {
      svd.left.col(j) *= -1.0;
      svd.right.col(j) *= -1.0;
    }
  }
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

TruncatedSvd dense_svd(const Eigen::MatrixXd& a, Eigen::Index rank) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out{svd.matrixU().leftCols(rank), svd.singularValues().head(rank), svd.matrixV().leftCols(rank)};
  fix_signs(out);
  return out;
}

// Range finder with subspace iteration, then an exact SVD of the small
// projected matrix B = Q^T A.
template <typename Matrix>
TruncatedSvd randomized_svd(const Matrix& a, Eigen::Index rank, const SvdOptions& options) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index width = std::min(rank + std::max<Eigen::Index>(options.oversampling, 0), std::min(m, n));

  Rng rng(options.seed);
  Eigen::MatrixXd omega(n, width);
  for (Eigen::Index j = 0; j < width; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = rng.normal();
  }
  Eigen::MatrixXd q = orthonormal_basis(a * omega);
  for (int it = 0; it < options.power_iterations; ++it) {
    Eigen::MatrixXd z = orthonormal_basis(a.transpose() * q);
    q = orthonormal_basis(a * z);
  }
  const Eigen::MatrixXd bt = a.transpose() * q;  // n x width, equals B^T
  Eigen::BDCSVD<Eigen::MatrixXd> small(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // B^T = Ub S Vb^T  =>  B = Vb S Ub^T  =>  A ~= (Q Vb) S Ub^T
  TruncatedSvd out{(q * small.matrixV()).leftCols(rank), small.singularValues().head(rank),
                   small.matrixU().leftCols(rank)};
  fix_signs(out);
  return out;
}

bool use_dense(Eigen::Index rows, Eigen::Index cols, const SvdOptions& options) {
  switch (options.method) {
    case SvdMethod::kDense: return true;
    case SvdMethod::kRandomized: return false;
    case SvdMethod::kAuto: return rows <= options.dense_limit && cols <= options.dense_limit;
  }
  return true;
}

}  // namespace

Eigen::MatrixXd TruncatedSvd::reconstruct() const {
  return left * singular_values.asDiagonal() * right.transpose();
}

TruncatedSvd truncated_svd(const Eigen::MatrixXd& a, Eigen::Index rank, const SvdOptions& options) {
  check_rank(a.rows(), a.cols(), rank);
  if (!a.allFinite()) throw NumericError("svd input has non-finite entries");
  return use_dense(a.rows(), a.cols(), options) ? dense_svd(a, rank) : randomized_svd(a, rank, options);
}

TruncatedSvd truncated_svd(const Eigen::SparseMatrix<double>& a, Eigen::Index rank, const SvdOptions& options) {
  check_rank(a.rows(), a.cols(), rank);
  if (use_dense(a.rows(), a.cols(), options)) return dense_svd(Eigen::MatrixXd(a), rank);
  return randomized_svd(a, rank, options);
}

}  // namespace labelvec
