// SPDX-License-Identifier: Apache-2.0
#include "stresseq/assembly.hpp"

#include "stresseq/quadrature.hpp"

#include <vector>

namespace stresseq {

SurfaceLoad cook_surface_load(double gamma) {
    return [gamma](const Vec2& x) {
        if (std::abs(x.x() - 0.48) < 1e-12) return Vec2(0.0, gamma);
        return Vec2(0.0, 0.0);
    };
}

std::array<double, 3> barycentric(const Mesh& mesh, int tri, const Vec2& x) {
    const auto& t = mesh.triangles[tri];
    const Vec2& a = mesh.vertices[t[0]];
    const Vec2& b = mesh.vertices[t[1]];
    const Vec2& c = mesh.vertices[t[2]];
    double area = 2.0 * mesh.signed_area(tri);
    auto cross = [](const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); };
    double b1 = cross(x - a, c - a) / area;
    double b2 = cross(b - a, x - a) / area;
    return {1.0 - b1 - b2, b1, b2};
}

namespace {

struct DofMask {
    std::vector<std::uint8_t> dirichlet;
    explicit DofMask(const TaylorHoodSpace& space) : dirichlet(space.num_dofs(), 0) {
        for (int d : space.dirichlet_dofs()) dirichlet[d] = 1;
    }
    bool operator()(int dof) const { return dirichlet[dof] != 0; }
};

// Adds the Neumann boundary terms <g, v> to the displacement block.
void add_surface_load(const DisplacementPressureField& field, const SurfaceLoad& load,
                      Eigen::VectorXd& residual) {
    const TaylorHoodSpace& space = *field.space;
    const Mesh& mesh = space.mesh();
    const SegmentRule& rule = segment_rule(kEdgeQuadPoints);

    for (const Edge& e : mesh.edges) {
        if (e.label != BoundaryLabel::Neumann) continue;
        int tri = e.tri_minus;
        for (size_t q = 0; q < rule.points.size(); ++q) {
            double s = rule.points[q];
            Vec2 x = (1.0 - s) * mesh.vertices[e.v0] + s * mesh.vertices[e.v1];
            Vec2 g = load(x);
            if (g.isZero()) continue;
            double w = rule.weights[q] * e.length;
            auto bc = barycentric(mesh, tri, x);
            auto vals = p2_values(bc[0], bc[1], bc[2]);
            for (int i = 0; i < 6; ++i) {
                int node = space.p2_node(tri, i);
                residual[2 * node] -= w * vals[i] * g.x();
                residual[2 * node + 1] -= w * vals[i] * g.y();
            }
        }
    }
}

} // namespace

Eigen::VectorXd assemble_residual(const DisplacementPressureField& field,
                                  const MaterialParams& params, const SurfaceLoad& load,
                                  const VolumeLoad& volume_load, bool apply_dirichlet) {
    const TaylorHoodSpace& space = *field.space;
    const Mesh& mesh = space.mesh();
    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);

    Eigen::VectorXd residual = Eigen::VectorXd::Zero(space.num_dofs());
    double inv_lambda = params.inv_lambda();

    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        double jac = 2.0 * mesh.area(tri);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            auto [b0, b1, b2] = rule.points[q];
            double w = rule.weights[q] * jac;

            Mat2 F = field.deformation_gradient(tri, b0, b1, b2);
            if (!(F.determinant() > 0.0))
                throw Error("NONPOSITIVE_DET", "element " + std::to_string(tri));
            double p = field.pressure(tri, b0, b1, b2);
            Mat2 P = piola_stress_pressure(F, p, params);

            auto grads = p2_gradients(mesh, tri, b0, b1, b2);
            for (int i = 0; i < 6; ++i) {
                int node = space.p2_node(tri, i);
                residual[2 * node] += w * P.row(0).dot(grads[i]);
                residual[2 * node + 1] += w * P.row(1).dot(grads[i]);
            }

            Vec2 x = mesh.point(tri, b0, b1, b2);
            Vec2 f = volume_load(x);
            if (!f.isZero()) {
                auto vals = p2_values(b0, b1, b2);
                for (int i = 0; i < 6; ++i) {
                    int node = space.p2_node(tri, i);
                    residual[2 * node] -= w * vals[i] * f.x();
                    residual[2 * node + 1] -= w * vals[i] * f.y();
                }
            }

            double volumetric = F.determinant() - 1.0 - inv_lambda * p;
            auto pvals = p1_values(b0, b1, b2);
            const auto& t = mesh.triangles[tri];
            for (int i = 0; i < 3; ++i) {
                residual[space.pressure_dof(t[i])] += w * volumetric * pvals[i];
            }
        }
    }

    add_surface_load(field, load, residual);

    if (apply_dirichlet) {
        for (int d : space.dirichlet_dofs()) residual[d] = field.u[d];
    }
    return residual;
}

AssembledSystem assemble_system(const DisplacementPressureField& field,
                                const MaterialParams& params, const SurfaceLoad& load,
                                const VolumeLoad& volume_load) {
    const TaylorHoodSpace& space = *field.space;
    const Mesh& mesh = space.mesh();
    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);
    const DofMask is_dirichlet(space);
    double inv_lambda = params.inv_lambda();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(mesh.num_triangles()) * 225);

    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        double jac = 2.0 * mesh.area(tri);
        Eigen::Matrix<double, 15, 15> local = Eigen::Matrix<double, 15, 15>::Zero();
        // Local dof order: (node 0..5) x (comp 0,1), then pressure 0..2.

        for (size_t q = 0; q < rule.points.size(); ++q) {
            auto [b0, b1, b2] = rule.points[q];
            double w = rule.weights[q] * jac;

            Mat2 F = field.deformation_gradient(tri, b0, b1, b2);
            KinematicState kin = KinematicState::from_F(F, tri);
            double p = field.pressure(tri, b0, b1, b2);

            auto grads = p2_gradients(mesh, tri, b0, b1, b2);
            auto pvals = p1_values(b0, b1, b2);

            for (int j = 0; j < 6; ++j) {
                for (int d = 0; d < 2; ++d) {
                    Mat2 dH = Mat2::Zero();
                    dH.row(d) = grads[j].transpose();
                    Mat2 dP = piola_stress_tangent(kin, p, 0.0, dH, params);
                    double dvol = kin.det_F * (kin.F_inv_T.row(d).dot(grads[j]));
                    for (int i = 0; i < 6; ++i) {
                        local(2 * i, 2 * j + d) += w * dP.row(0).dot(grads[i]);
                        local(2 * i + 1, 2 * j + d) += w * dP.row(1).dot(grads[i]);
                    }
                    for (int i = 0; i < 3; ++i) {
                        local(12 + i, 2 * j + d) += w * dvol * pvals[i];
                    }
                }
            }
            double dp_coeff = 1.0 + p * inv_lambda;
            for (int j = 0; j < 3; ++j) {
                // displacement rows, pressure columns
                for (int i = 0; i < 6; ++i) {
                    local(2 * i, 12 + j) += w * dp_coeff * pvals[j] * kin.F_inv_T.row(0).dot(grads[i]);
                    local(2 * i + 1, 12 + j) +=
                        w * dp_coeff * pvals[j] * kin.F_inv_T.row(1).dot(grads[i]);
                }
                for (int i = 0; i < 3; ++i) {
                    local(12 + i, 12 + j) += -w * inv_lambda * pvals[i] * pvals[j];
                }
            }
        }

        std::array<int, 15> dofs;
        for (int i = 0; i < 6; ++i) {
            int node = space.p2_node(tri, i);
            dofs[2 * i] = space.displacement_dof(node, 0);
            dofs[2 * i + 1] = space.displacement_dof(node, 1);
        }
        const auto& t = mesh.triangles[tri];
        for (int i = 0; i < 3; ++i) dofs[12 + i] = space.pressure_dof(t[i]);

        for (int i = 0; i < 15; ++i) {
            if (is_dirichlet(dofs[i])) continue;
            for (int j = 0; j < 15; ++j) {
                if (is_dirichlet(dofs[j])) continue;
                double v = local(i, j);
                if (v != 0.0) triplets.emplace_back(dofs[i], dofs[j], v);
            }
        }
    }

    for (int d : space.dirichlet_dofs()) triplets.emplace_back(d, d, 1.0);

    AssembledSystem out;
    out.tangent.resize(space.num_dofs(), space.num_dofs());
    out.tangent.setFromTriplets(triplets.begin(), triplets.end());
    out.residual = assemble_residual(field, params, load, volume_load, /*apply_dirichlet=*/true);
    return out;
}

double min_det_f(const DisplacementPressureField& field) {
    const Mesh& mesh = field.space->mesh();
    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);
    double out = std::numeric_limits<double>::infinity();
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        for (const auto& pt : rule.points) {
            Mat2 F = field.deformation_gradient(tri, pt.b0, pt.b1, pt.b2);
            out = std::min(out, F.determinant());
        }
    }
    return out;
}

} // namespace stresseq
