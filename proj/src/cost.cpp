#include "wba/cost.hpp"

namespace wba {

Matrix cosine_distance_matrix(const Matrix& x) {
  const Vector norms = x.rowwise().norm();
  if ((norms.array() == 0.0).any())
    throw std::invalid_argument("cosine_distance_matrix: zero-norm row");
  Matrix unit = x.array().colwise() / norms.array();
  Matrix d = Matrix::Ones(x.rows(), x.rows()) - unit * unit.transpose();
  d = d.cwiseMax(0.0).cwiseMin(2.0);
  d.diagonal().setZero();
  // symmetrize away last-bit asymmetry from the gemm
  d = 0.5 * (d + d.transpose()).eval();
  return d;
}

Matrix squared_euclidean_cost(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("squared_euclidean_cost: dimension mismatch");
  const Vector a2 = a.rowwise().squaredNorm();
  const Vector b2 = b.rowwise().squaredNorm();
  Matrix c = (-2.0 * a * b.transpose());
  c.colwise() += a2;
  c.rowwise() += b2.transpose();
  return c.cwiseMax(0.0);
}

}  // namespace wba
