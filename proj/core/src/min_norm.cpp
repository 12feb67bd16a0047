// SPDX-License-Identifier: Apache-2.0
#include "stresseq/min_norm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace stresseq {

ConstrainedMinNorm solve_constrained_min_norm(const Eigen::MatrixXd& C, const Eigen::VectorXd& b,
                                              const Eigen::MatrixXd& M,
                                              const Eigen::VectorXd& target, double rank_tol) {
    const int m = static_cast<int>(C.rows());
    const int n = static_cast<int>(C.cols());

    ConstrainedMinNorm out;
    if (m == 0) {
        out.x = target;
        out.null_dim = n;
        out.null_space = Eigen::MatrixXd::Identity(n, n);
        out.left_null = Eigen::MatrixXd(0, 0);
        out.singular_values = Eigen::VectorXd(0);
        return out;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    out.singular_values = sigma;
    double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
    int rank = 0;
    for (int i = 0; i < sigma.size(); ++i) {
        if (sigma[i] > rank_tol * sigma_max && sigma[i] > 0.0) ++rank;
    }
    out.rank = rank;
    out.null_dim = n - rank;
    out.left_null_dim = m - rank;

    Eigen::MatrixXd U = svd.matrixU();
    Eigen::MatrixXd V = svd.matrixV();
    out.null_space = V.rightCols(out.null_dim);
    out.left_null = U.rightCols(out.left_null_dim);

    // Minimum-norm least-squares particular solution (projects b onto range C).
    Eigen::VectorXd ub = U.leftCols(rank).transpose() * b;
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < rank; ++i) x0 += (ub[i] / sigma[i]) * V.col(i);
    out.incompatibility = (b - U.leftCols(rank) * ub).norm();

    if (out.null_dim > 0) {
        const Eigen::MatrixXd& N = out.null_space;
        Eigen::MatrixXd H = N.transpose() * M * N;
        Eigen::VectorXd g = N.transpose() * (M * (target - x0));
        Eigen::VectorXd y = H.ldlt().solve(g);
        out.x = x0 + N * y;
    } else {
        out.x = x0;
    }
    return out;
}

} // namespace stresseq
