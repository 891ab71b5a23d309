#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace labelvec {

/// Rank-k factors A ~= U diag(s) V^T with s non-negative and non-increasing.
/// Sign convention: the largest-magnitude entry of each column of U is
/// positive (first such entry on ties); V is flipped alongside.
struct TruncatedSvd {
  Eigen::MatrixXd left;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd right;

  Eigen::Index rank() const { return singular_values.size(); }
  Eigen::MatrixXd reconstruct() const;
};

enum class SvdMethod { kAuto, kDense, kRandomized };

struct SvdOptions {
  SvdMethod method = SvdMethod::kAuto;
  /// kAuto uses the exact dense SVD when both dimensions are at most this.
  Eigen::Index dense_limit = 2000;
  Eigen::Index oversampling = 10;
  int power_iterations = 4;
  std::uint64_t seed = 0;
};

TruncatedSvd truncated_svd(const Eigen::MatrixXd& a, Eigen::Index rank, const SvdOptions& options = {});
TruncatedSvd truncated_svd(const Eigen::SparseMatrix<double>& a, Eigen::Index rank,
                           const SvdOptions& options = {});

}  // namespace labelvec
