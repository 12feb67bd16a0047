// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/types.hpp"

#include <Eigen/Core>

namespace stresseq {

/// Result of an equality-constrained quadratic minimum-norm solve.
struct ConstrainedMinNorm {
    Eigen::VectorXd x;
    int rank = 0;                   // numerical rank of the constraint matrix
    int null_dim = 0;               // dim null(C)  (columns)
    int left_null_dim = 0;          // dim null(C^T) (rows)
    double incompatibility = 0.0;   // || b - proj_range(C) b ||
    Eigen::MatrixXd null_space;     // orthonormal basis of null(C), n x null_dim
    Eigen::MatrixXd left_null;      // orthonormal basis of null(C^T), m x left_null_dim
    Eigen::VectorXd singular_values;
};

/// Minimizes (x - target)^T M (x - target) subject to C x = b, with b
/// replaced by its projection onto range(C) when it is incompatible; the
/// returned incompatibility measures what was dropped. M must be symmetric
/// positive definite. Rank decisions use rank_tol relative to the largest
/// singular value of C.
ConstrainedMinNorm solve_constrained_min_norm(const Eigen::MatrixXd& C, const Eigen::VectorXd& b,
                                              const Eigen::MatrixXd& M,
                                              const Eigen::VectorXd& target,
                                              double rank_tol = 1e-10);

/// Same with target = 0 (plain minimum-M-norm solution).
inline ConstrainedMinNorm solve_constrained_min_norm(const Eigen::MatrixXd& C,
                                                     const Eigen::VectorXd& b,
                                                     const Eigen::MatrixXd& M,
                                                     double rank_tol = 1e-10) {
    return solve_constrained_min_norm(C, b, M, Eigen::VectorXd::Zero(C.cols()), rank_tol);
}

} // namespace stresseq
