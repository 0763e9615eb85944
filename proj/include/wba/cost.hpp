#pragma once

#include "wba/distribution.hpp"

namespace wba {

// D(j,k) = 1 - <x_j,x_k> / (|x_j||x_k|). Symmetric, zero diagonal, entries
// in [0,2]. Rejects zero-norm rows.
Matrix cosine_distance_matrix(const Matrix& x);

// C(j,l) = |a_j - b_l|^2 via the expansion |a|^2 + |b|^2 - 2<a,b>, clamped
// at zero.
Matrix squared_euclidean_cost(const Matrix& a, const Matrix& b);

}  // namespace wba
