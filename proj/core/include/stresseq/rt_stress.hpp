// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/mesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace stresseq {

/// Element-wise degree-1 Raviart-Thomas basis for one tensor row,
/// q in P1(T)^2 + P1(T)*x, constructed as the dual basis of eight
/// degrees of freedom defined with global edge conventions:
///
///   dof 2i   : mean of q.n over edge i            (edge normal from Mesh)
///   dof 2i+1 : linear moment of q.n against 2s-1, normalized so that
///              q.n|_S = dof_{2i} + dof_{2i+1} (2s-1), s from lo() to hi()
///   dof 6,7  : mean of the two components over the element
///
/// Degrees of freedom of adjacent elements on a shared edge therefore refer
/// to the same trace functionals, so jumps are plain coefficient differences.
class RTBasisTable {
public:
    explicit RTBasisTable(const Mesh& mesh);

    const Mesh& mesh() const { return *mesh_; }

    /// Values of the 8 basis functions at a physical point (columns).
    Eigen::Matrix<double, 2, 8> basis_values(int tri, const Vec2& x) const;

    /// Divergences of the 8 basis functions at a physical point.
    Eigen::Matrix<double, 1, 8> basis_divergence(int tri, const Vec2& x) const;

    /// The 8 dof functionals applied to an arbitrary (smooth) vector field.
    Eigen::Matrix<double, 8, 1> dof_functionals(
        int tri, const std::function<Vec2(const Vec2&)>& field) const;

    Vec2 center(int tri) const { return centers_[tri]; }
    double scale(int tri) const { return scales_[tri]; }

private:
    const Mesh* mesh_;
    std::vector<Eigen::Matrix<double, 8, 8>> coef_; // monomial -> dual basis
    std::vector<Vec2> centers_;
    std::vector<double> scales_;

    Eigen::Matrix<double, 2, 8> monomials(int tri, const Vec2& x) const;
    Eigen::Matrix<double, 1, 8> monomial_divergence(int tri, const Vec2& x) const;
};

/// Per-element P1 tensor field P(x) = c0 + cx*xi + cy*eta in the centered
/// coordinates (xi, eta) = (x - center)/scale of the element.
struct ElementP1Tensor {
    Mat2 c0 = Mat2::Zero();
    Mat2 cx = Mat2::Zero();
    Mat2 cy = Mat2::Zero();
};

/// Broken RT tensor field: each row of the 2x2 stress is an element-wise RT
/// function; 16 coefficients per triangle, rows not coupled across elements.
struct BrokenRTStress {
    const RTBasisTable* table = nullptr;
    Eigen::VectorXd coef; // [tri][row][dof] with strides 16, 8, 1

    static BrokenRTStress zero(const RTBasisTable& table);

    /// Exact interpolation of a per-element P1 tensor (P1^{2x2} is a subset
    /// of the row-wise RT space).
    static BrokenRTStress from_p1(const RTBasisTable& table,
                                  const std::vector<ElementP1Tensor>& p1);

    double& dof(int tri, int row, int k) { return coef[16 * tri + 8 * row + k]; }
    double dof(int tri, int row, int k) const { return coef[16 * tri + 8 * row + k]; }

    Mat2 value(int tri, const Vec2& x) const;
    Vec2 divergence(int tri, const Vec2& x) const; // row-wise

    /// P1(S) coefficients (mean, linear in 2s-1) of row.n on an edge of tri.
    Vec2 trace_coeffs(int tri, int local_edge, int row) const;

    /// Trace of P.n restricted from the given triangle, as a function of the
    /// edge parameter s in [0,1].
    Vec2 normal_trace(int tri, int edge_id, double s) const;

    /// Jump over an edge: trace from tri_minus
    /// minus trace from tri_plus; on boundary edges the tri_minus trace.
    Vec2 jump(int edge_id, double s) const;

    BrokenRTStress& operator+=(const BrokenRTStress& other);
};

} // namespace stresseq
