// SPDX-License-Identifier: Apache-2.0
#include "stresseq/rt_stress.hpp"

#include "stresseq/quadrature.hpp"

#include <Eigen/LU>

namespace stresseq {

Eigen::Matrix<double, 2, 8> RTBasisTable::monomials(int tri, const Vec2& x) const {
    double xi = (x.x() - centers_[tri].x()) / scales_[tri];
    double eta = (x.y() - centers_[tri].y()) / scales_[tri];
    Eigen::Matrix<double, 2, 8> m;
    m << 1, 0, xi, 0, eta, 0, xi * xi, xi * eta,
         0, 1, 0, xi, 0, eta, xi * eta, eta * eta;
    return m;
}

Eigen::Matrix<double, 1, 8> RTBasisTable::monomial_divergence(int tri, const Vec2& x) const {
    double h = scales_[tri];
    double xi = (x.x() - centers_[tri].x()) / h;
    double eta = (x.y() - centers_[tri].y()) / h;
    Eigen::Matrix<double, 1, 8> d;
    d << 0, 0, 1.0 / h, 0, 0, 1.0 / h, 3.0 * xi / h, 3.0 * eta / h;
    return d;
}

RTBasisTable::RTBasisTable(const Mesh& mesh) : mesh_(&mesh) {
    const int nt = mesh.num_triangles();
    coef_.resize(nt);
    centers_.resize(nt);
    scales_.resize(nt);

    const SegmentRule& erule = segment_rule(4);
    const TriangleRule& trule = triangle_rule(4);

    for (int t = 0; t < nt; ++t) {
        centers_[t] = mesh.centroid(t);
        scales_[t] = mesh.diameter(t);

        Eigen::Matrix<double, 8, 8> vander = Eigen::Matrix<double, 8, 8>::Zero();
        // Edge moment rows.
        for (int le = 0; le < 3; ++le) {
            const Edge& e = mesh.edges[mesh.tri_edges[t][le]];
            for (size_t q = 0; q < erule.points.size(); ++q) {
                double s = erule.points[q];
                Vec2 x = (1.0 - s) * mesh.vertices[e.v0] + s * mesh.vertices[e.v1];
                Eigen::Matrix<double, 2, 8> m = monomials(t, x);
                Eigen::Matrix<double, 1, 8> qn = e.normal.transpose() * m;
                vander.row(2 * le) += erule.weights[q] * qn;
                vander.row(2 * le + 1) += 3.0 * erule.weights[q] * (2.0 * s - 1.0) * qn;
            }
        }
        // Interior mean rows; reference weights times 2 average over the element.
        for (size_t q = 0; q < trule.points.size(); ++q) {
            auto [b0, b1, b2] = trule.points[q];
            Vec2 x = mesh.point(t, b0, b1, b2);
            double w = 2.0 * trule.weights[q];
            vander.row(6) += w * monomials(t, x).row(0);
            vander.row(7) += w * monomials(t, x).row(1);
        }

        Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(vander);
        if (!lu.isInvertible())
            throw Error("RT_BASIS_SINGULAR", "element " + std::to_string(t));
        coef_[t] = lu.inverse();
    }
}

Eigen::Matrix<double, 2, 8> RTBasisTable::basis_values(int tri, const Vec2& x) const {
    return monomials(tri, x) * coef_[tri];
}

Eigen::Matrix<double, 1, 8> RTBasisTable::basis_divergence(int tri, const Vec2& x) const {
    return monomial_divergence(tri, x) * coef_[tri];
}

Eigen::Matrix<double, 8, 1> RTBasisTable::dof_functionals(
    int tri, const std::function<Vec2(const Vec2&)>& field) const {
    const Mesh& mesh = *mesh_;
    Eigen::Matrix<double, 8, 1> out = Eigen::Matrix<double, 8, 1>::Zero();
    const SegmentRule& erule = segment_rule(kEdgeQuadPoints);
    for (int le = 0; le < 3; ++le) {
        const Edge& e = mesh.edges[mesh.tri_edges[tri][le]];
        for (size_t q = 0; q < erule.points.size(); ++q) {
            double s = erule.points[q];
            Vec2 x = (1.0 - s) * mesh.vertices[e.v0] + s * mesh.vertices[e.v1];
            double qn = e.normal.dot(field(x));
            out[2 * le] += erule.weights[q] * qn;
            out[2 * le + 1] += 3.0 * erule.weights[q] * (2.0 * s - 1.0) * qn;
        }
    }
    const TriangleRule& trule = triangle_rule(kMaterialQuadOrder);
    for (size_t q = 0; q < trule.points.size(); ++q) {
        auto [b0, b1, b2] = trule.points[q];
        Vec2 x = mesh.point(tri, b0, b1, b2);
        Vec2 v = field(x);
        out[6] += 2.0 * trule.weights[q] * v.x();
        out[7] += 2.0 * trule.weights[q] * v.y();
    }
    return out;
}

BrokenRTStress BrokenRTStress::zero(const RTBasisTable& table) {
    BrokenRTStress s;
    s.table = &table;
    s.coef = Eigen::VectorXd::Zero(16 * table.mesh().num_triangles());
    return s;
}

BrokenRTStress BrokenRTStress::from_p1(const RTBasisTable& table,
                                       const std::vector<ElementP1Tensor>& p1) {
    BrokenRTStress s = zero(table);
    const Mesh& mesh = table.mesh();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        Vec2 c = table.center(t);
        double h = table.scale(t);
        const ElementP1Tensor& e = p1[t];
        for (int row = 0; row < 2; ++row) {
            auto row_field = [&](const Vec2& x) -> Vec2 {
                double xi = (x.x() - c.x()) / h;
                double eta = (x.y() - c.y()) / h;
                Mat2 val = e.c0 + xi * e.cx + eta * e.cy;
                return val.row(row).transpose();
            };
            Eigen::Matrix<double, 8, 1> dofs = table.dof_functionals(t, row_field);
            for (int k = 0; k < 8; ++k) s.dof(t, row, k) = dofs[k];
        }
    }
    return s;
}

Mat2 BrokenRTStress::value(int tri, const Vec2& x) const {
    Eigen::Matrix<double, 2, 8> basis = table->basis_values(tri, x);
    Mat2 out;
    for (int row = 0; row < 2; ++row) {
        Eigen::Matrix<double, 8, 1> a = coef.segment<8>(16 * tri + 8 * row);
        out.row(row) = (basis * a).transpose();
    }
    return out;
}

Vec2 BrokenRTStress::divergence(int tri, const Vec2& x) const {
    Eigen::Matrix<double, 1, 8> div = table->basis_divergence(tri, x);
    Vec2 out;
    for (int row = 0; row < 2; ++row) {
        Eigen::Matrix<double, 8, 1> a = coef.segment<8>(16 * tri + 8 * row);
        out[row] = div * a;
    }
    return out;
}

Vec2 BrokenRTStress::trace_coeffs(int tri, int local_edge, int row) const {
    return Vec2(dof(tri, row, 2 * local_edge), dof(tri, row, 2 * local_edge + 1));
}

Vec2 BrokenRTStress::normal_trace(int tri, int edge_id, double s) const {
    const Mesh& mesh = table->mesh();
    int local = -1;
    for (int le = 0; le < 3; ++le) {
        if (mesh.tri_edges[tri][le] == edge_id) local = le;
    }
    if (local < 0) throw Error("BAD_ARGUMENT", "edge not adjacent to triangle");
    Vec2 out;
    for (int row = 0; row < 2; ++row) {
        Vec2 c = trace_coeffs(tri, local, row);
        out[row] = c[0] + c[1] * (2.0 * s - 1.0);
    }
    return out;
}

Vec2 BrokenRTStress::jump(int edge_id, double s) const {
    const Edge& e = table->mesh().edges[edge_id];
    Vec2 out = normal_trace(e.tri_minus, edge_id, s);
    if (!e.on_boundary()) out -= normal_trace(e.tri_plus, edge_id, s);
    return out;
}

BrokenRTStress& BrokenRTStress::operator+=(const BrokenRTStress& other) {
    coef += other.coef;
    return *this;
}

} // namespace stresseq
