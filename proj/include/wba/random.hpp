#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace wba {

using Rng = std::mt19937_64;

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal(rng);
  return out;
}

// Random orthogonal matrix from the QR of a Gaussian, with the sign fix that
// makes the distribution Haar and the factorization unique.
inline Eigen::MatrixXd random_orthogonal(Eigen::Index d, Rng& rng) {
  Eigen::MatrixXd g = gaussian_matrix(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace wba
