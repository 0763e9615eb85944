#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace wba {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Weighted point cloud: sum_j mass[j] * delta_{support.row(j)}.
// Also used for the barycenter and its support.
struct DiscreteDistribution {
  Matrix support;  // k x d locations
  Vector mass;     // length k, nonnegative, sums to 1

  DiscreteDistribution() = default;
  DiscreteDistribution(Matrix support_, Vector mass_)
      : support(std::move(support_)), mass(std::move(mass_)) {
    validate();
  }

  Eigen::Index size() const { return support.rows(); }
  Eigen::Index dim() const { return support.cols(); }

  void validate() const {
    if (support.rows() != mass.size())
      throw std::invalid_argument("distribution: support rows != mass length");
    if ((mass.array() < 0.0).any())
      throw std::invalid_argument("distribution: negative mass");
    if (std::abs(mass.sum() - 1.0) > 1e-9)
      throw std::invalid_argument("distribution: mass does not sum to 1");
  }

  static DiscreteDistribution uniform(Matrix support_) {
    const Eigen::Index k = support_.rows();
    return {std::move(support_), Vector::Constant(k, 1.0 / static_cast<double>(k))};
  }
};

}  // namespace wba
