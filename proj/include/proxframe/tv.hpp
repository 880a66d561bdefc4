#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace proxframe {

/// Anisotropic total-variation difference operator for an n1 x n2 image
/// vectorized column by column. The rows stack all vertical differences
/// x(j+1,k) - x(j,k) followed by all horizontal differences
/// x(j,k+1) - x(j,k), giving 2*n1*n2 - n1 - n2 rows in total; each row holds
/// exactly one +1 and one -1. The operator has a one-dimensional kernel
/// spanned by the constant image, so it is not a frame.
Eigen::MatrixXd tv_matrix(long n1, long n2);

/// Sparse triplet form of the same operator, for fast applies.
Eigen::SparseMatrix<double> tv_matrix_sparse(long n1, long n2);

}  // namespace proxframe
