// SPDX-License-Identifier: Apache-2.0
#include "stresseq/diagnostics.hpp"

#include "stresseq/quadrature.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace stresseq {

Vec2 resultant_traction(const BrokenRTStress& stress, BoundaryLabel part) {
    const Mesh& mesh = stress.table->mesh();
    Vec2 out = Vec2::Zero();
    for (int ei = 0; ei < mesh.num_edges(); ++ei) {
        const Edge& e = mesh.edges[ei];
        if (e.label != part) continue;
        // Mean trace dof integrates exactly: int P.n = |S| * mean.
        for (int le = 0; le < 3; ++le) {
            if (mesh.tri_edges[e.tri_minus][le] != ei) continue;
            for (int row = 0; row < 2; ++row) {
                out[row] += e.length * stress.trace_coeffs(e.tri_minus, le, row)[0];
            }
        }
    }
    return out;
}

double resultant_normal_traction(const BrokenRTStress& stress) {
    const Mesh& mesh = stress.table->mesh();
    double out = 0.0;
    for (int ei = 0; ei < mesh.num_edges(); ++ei) {
        const Edge& e = mesh.edges[ei];
        if (e.label != BoundaryLabel::Dirichlet) continue;
        for (int le = 0; le < 3; ++le) {
            if (mesh.tri_edges[e.tri_minus][le] != ei) continue;
            Vec2 mean(stress.trace_coeffs(e.tri_minus, le, 0)[0],
                      stress.trace_coeffs(e.tri_minus, le, 1)[0]);
            out += e.length * e.normal.dot(mean);
        }
    }
    return out;
}

Vec2 resultant_traction_projected(const PipelineInputs& in, const ProjectedStressField& stress,
                                  BoundaryLabel part) {
    const Mesh& mesh = *in.mesh;
    const SegmentRule& rule = segment_rule(kEdgeQuadPoints);
    Vec2 out = Vec2::Zero();
    for (const Edge& e : mesh.edges) {
        if (e.label != part) continue;
        for (size_t q = 0; q < rule.points.size(); ++q) {
            double s = rule.points[q];
            Vec2 x = (1.0 - s) * mesh.vertices[e.v0] + s * mesh.vertices[e.v1];
            out += rule.weights[q] * e.length * (stress.value(e.tri_minus, x) * e.normal);
        }
    }
    return out;
}

double resultant_normal_traction_projected(const PipelineInputs& in,
                                           const ProjectedStressField& stress) {
    const Mesh& mesh = *in.mesh;
    const SegmentRule& rule = segment_rule(kEdgeQuadPoints);
    double out = 0.0;
    for (const Edge& e : mesh.edges) {
        if (e.label != BoundaryLabel::Dirichlet) continue;
        for (size_t q = 0; q < rule.points.size(); ++q) {
            double s = rule.points[q];
            Vec2 x = (1.0 - s) * mesh.vertices[e.v0] + s * mesh.vertices[e.v1];
            out += rule.weights[q] * e.length *
                   e.normal.dot(stress.value(e.tri_minus, x) * e.normal);
        }
    }
    return out;
}

namespace {

// Dirichlet edges of the Cook geometry ordered by arc length (y-coordinate).
std::vector<int> dirichlet_edges_ordered(const Mesh& mesh) {
    std::vector<int> edges;
    for (int ei = 0; ei < mesh.num_edges(); ++ei) {
        if (mesh.edges[ei].label == BoundaryLabel::Dirichlet) edges.push_back(ei);
    }
    std::sort(edges.begin(), edges.end(), [&](int a, int b) {
        double ya = std::min(mesh.vertices[mesh.edges[a].v0].y(),
                             mesh.vertices[mesh.edges[a].v1].y());
        double yb = std::min(mesh.vertices[mesh.edges[b].v0].y(),
                             mesh.vertices[mesh.edges[b].v1].y());
        return ya < yb;
    });
    return edges;
}

double arclength_on_dirichlet(const Mesh& mesh, const Vec2& x) {
    (void)mesh;
    return x.y(); // Gamma_D is the segment x = 0, parameterized by height
}

} // namespace

double TractionProfile::integral() const {
    double out = 0.0;
    for (size_t i = 0; i + 1 < samples.size(); i += 2) {
        double ds = samples[i + 1].arclength - samples[i].arclength;
        out += 0.5 * ds * (samples[i].value + samples[i + 1].value);
    }
    return out;
}

TractionProfile traction_profile(const BrokenRTStress& stress) {
    const Mesh& mesh = stress.table->mesh();
    TractionProfile profile;
    for (int ei : dirichlet_edges_ordered(mesh)) {
        const Edge& e = mesh.edges[ei];
        double y0 = mesh.vertices[e.v0].y();
        double y1 = mesh.vertices[e.v1].y();
        double s_at_min = (y0 <= y1) ? 0.0 : 1.0;
        for (double send : {s_at_min, 1.0 - s_at_min}) {
            Vec2 tr = stress.normal_trace(e.tri_minus, ei, send);
            Vec2 x = (1.0 - send) * mesh.vertices[e.v0] + send * mesh.vertices[e.v1];
            profile.samples.push_back({arclength_on_dirichlet(mesh, x), e.normal.dot(tr)});
        }
    }
    return profile;
}

TractionProfile traction_profile_projected(const PipelineInputs& in,
                                           const ProjectedStressField& stress) {
    const Mesh& mesh = *in.mesh;
    TractionProfile profile;
    for (int ei : dirichlet_edges_ordered(mesh)) {
        const Edge& e = mesh.edges[ei];
        double y0 = mesh.vertices[e.v0].y();
        double y1 = mesh.vertices[e.v1].y();
        double s_at_min = (y0 <= y1) ? 0.0 : 1.0;
        for (double send : {s_at_min, 1.0 - s_at_min}) {
            Vec2 x = (1.0 - send) * mesh.vertices[e.v0] + send * mesh.vertices[e.v1];
            Vec2 tr = stress.value(e.tri_minus, x) * e.normal;
            profile.samples.push_back({arclength_on_dirichlet(mesh, x), e.normal.dot(tr)});
        }
    }
    return profile;
}

double hminus_half_norm(const TaylorHoodSpace& space, const BoundaryFunctional& s) {
    const Mesh& mesh = space.mesh();
    const int n = space.num_p2_nodes();
    const TriangleRule& rule = triangle_rule(kPolynomialQuadOrder);
    const SegmentRule& erule = segment_rule(kEdgeQuadPoints);

    // Scalar H1 operator on the P2 space (no boundary conditions).
    std::vector<Eigen::Triplet<double>> triplets;
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        double jac = 2.0 * mesh.area(tri);
        Eigen::Matrix<double, 6, 6> local = Eigen::Matrix<double, 6, 6>::Zero();
        for (size_t q = 0; q < rule.points.size(); ++q) {
            auto [b0, b1, b2] = rule.points[q];
            double w = rule.weights[q] * jac;
            auto vals = p2_values(b0, b1, b2);
            auto grads = p2_gradients(mesh, tri, b0, b1, b2);
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) {
                    local(i, j) += w * (grads[i].dot(grads[j]) + vals[i] * vals[j]);
                }
            }
        }
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                triplets.emplace_back(space.p2_node(tri, i), space.p2_node(tri, j), local(i, j));
            }
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw Error("LINEAR_SOLVE_FAILED", "Riesz lift operator");

    // Component-wise right-hand sides <s, v>.
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 2);
    for (const auto& ed : s.edges) {
        const Edge& e = mesh.edges[ed.edge_id];
        for (size_t q = 0; q < erule.points.size(); ++q) {
            double sq = erule.points[q];
            double w = erule.weights[q] * e.length;
            Vec2 x = (1.0 - sq) * mesh.vertices[e.v0] + sq * mesh.vertices[e.v1];
            auto bc = barycentric(mesh, e.tri_minus, x);
            auto vals = p2_values(bc[0], bc[1], bc[2]);
            for (int i = 0; i < 6; ++i) {
                int node = space.p2_node(e.tri_minus, i);
                rhs(node, 0) += w * vals[i] * ed.values[q].x();
                rhs(node, 1) += w * vals[i] * ed.values[q].y();
            }
        }
    }

    double norm_sq = 0.0;
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd w = lu.solve(rhs.col(c));
        if (lu.info() != Eigen::Success) throw Error("LINEAR_SOLVE_FAILED", "Riesz lift solve");
        norm_sq += rhs.col(c).dot(w);
    }
    return std::sqrt(std::max(0.0, norm_sq));
}

namespace {

// Coarse Dirichlet edge containing height y, with its parameter.
std::pair<int, double> locate_dirichlet(const Mesh& mesh, double y) {
    for (int ei = 0; ei < mesh.num_edges(); ++ei) {
        const Edge& e = mesh.edges[ei];
        if (e.label != BoundaryLabel::Dirichlet) continue;
        double y0 = mesh.vertices[e.v0].y();
        double y1 = mesh.vertices[e.v1].y();
        double lo = std::min(y0, y1), hi = std::max(y0, y1);
        if (y >= lo - 1e-12 && y <= hi + 1e-12) {
            double s = (y - y0) / (y1 - y0);
            return {ei, std::clamp(s, 0.0, 1.0)};
        }
    }
    throw Error("BAD_ARGUMENT", "no Dirichlet edge at height " + std::to_string(y));
}

} // namespace

BoundaryFunctional traction_difference_reconstructed(const BrokenRTStress& fine,
                                                     const BrokenRTStress& coarse) {
    const Mesh& fine_mesh = fine.table->mesh();
    const Mesh& coarse_mesh = coarse.table->mesh();
    const SegmentRule& erule = segment_rule(kEdgeQuadPoints);

    BoundaryFunctional out;
    for (int ei = 0; ei < fine_mesh.num_edges(); ++ei) {
        const Edge& e = fine_mesh.edges[ei];
        if (e.label != BoundaryLabel::Dirichlet) continue;
        BoundaryFunctional::EdgeData data;
        data.edge_id = ei;
        for (size_t q = 0; q < erule.points.size(); ++q) {
            double s = erule.points[q];
            Vec2 x = (1.0 - s) * fine_mesh.vertices[e.v0] + s * fine_mesh.vertices[e.v1];
            Vec2 tf = fine.normal_trace(e.tri_minus, ei, s);
            auto [cei, cs] = locate_dirichlet(coarse_mesh, x.y());
            Vec2 tc = coarse.normal_trace(coarse_mesh.edges[cei].tri_minus, cei, cs);
            data.values.push_back(tf - tc);
        }
        out.edges.push_back(std::move(data));
    }
    return out;
}

BoundaryFunctional traction_difference_material(const PipelineInputs& fine,
                                                const PipelineInputs& coarse) {
    const Mesh& fine_mesh = *fine.mesh;
    const Mesh& coarse_mesh = *coarse.mesh;
    const SegmentRule& erule = segment_rule(kEdgeQuadPoints);

    BoundaryFunctional out;
    for (int ei = 0; ei < fine_mesh.num_edges(); ++ei) {
        const Edge& e = fine_mesh.edges[ei];
        if (e.label != BoundaryLabel::Dirichlet) continue;
        BoundaryFunctional::EdgeData data;
        data.edge_id = ei;
        for (size_t q = 0; q < erule.points.size(); ++q) {
            double s = erule.points[q];
            Vec2 x = (1.0 - s) * fine_mesh.vertices[e.v0] + s * fine_mesh.vertices[e.v1];

            auto bc_f = barycentric(fine_mesh, e.tri_minus, x);
            Mat2 Pf = fine.stress_at(e.tri_minus, bc_f[0], bc_f[1], bc_f[2]);

            auto [cei, cs] = locate_dirichlet(coarse_mesh, x.y());
            int ctri = coarse_mesh.edges[cei].tri_minus;
            auto bc_c = barycentric(coarse_mesh, ctri, x);
            Mat2 Pc = coarse.stress_at(ctri, bc_c[0], bc_c[1], bc_c[2]);

            data.values.push_back((Pf - Pc) * e.normal);
        }
        out.edges.push_back(std::move(data));
    }
    return out;
}

double AuditReport::worst() const {
    return std::max({element_divergence, side_jumps, neumann_trace, weak_symmetry});
}

AuditReport momentum_and_symmetry_audit(const PipelineInputs& in, const EquilibrationResult& eq,
                                        const SurfaceLoad& g, TestSpaceVariant variant) {
    const Mesh& mesh = *in.mesh;
    const TriangleRule& trule = triangle_rule(kMaterialQuadOrder);
    const SegmentRule& erule = segment_rule(kEdgeQuadPoints);
    const BrokenRTStress& rec = eq.reconstruction;

    AuditReport report;
    double stress_norm_sq = 0.0;

    // Element-wise momentum: (div P_h^R + fhat, z)_T for the element tests.
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        double jac = 2.0 * mesh.area(tri);
        std::array<double, 6> residual{};
        for (size_t q = 0; q < trule.points.size(); ++q) {
            auto [b0, b1, b2] = trule.points[q];
            double w = trule.weights[q] * jac;
            Vec2 x = mesh.point(tri, b0, b1, b2);
            Vec2 div_plus_f = rec.divergence(tri, x) + eq.projected_load.value(tri, x);
            auto tests = element_test_values(in, variant, tri, b0, b1, b2);
            for (int t = 0; t < 6; ++t) residual[t] += w * div_plus_f.dot(tests[t]);
            stress_norm_sq += w * rec.value(tri, x).squaredNorm();
        }
        for (double r : residual) {
            report.element_divergence = std::max(report.element_divergence, std::abs(r));
        }
    }
    report.scale = 1.0 + std::sqrt(stress_norm_sq);

    // Side jump moments and Neumann trace moments.
    for (int ei = 0; ei < mesh.num_edges(); ++ei) {
        const Edge& e = mesh.edges[ei];
        if (e.label == BoundaryLabel::Dirichlet) continue;
        std::array<double, 4> residual{};
        for (size_t q = 0; q < erule.points.size(); ++q) {
            double s = erule.points[q];
            double w = erule.weights[q] * e.length;
            auto tests = side_test_values(in, variant, ei, s);
            if (e.on_boundary()) {
                Vec2 x = (1.0 - s) * mesh.vertices[e.v0] + s * mesh.vertices[e.v1];
                Vec2 trace = rec.normal_trace(e.tri_minus, ei, s);
                for (int t = 0; t < 4; ++t) {
                    residual[t] += w * (trace - g(x)).dot(tests[t]);
                }
            } else {
                Vec2 jump = rec.jump(ei, s);
                for (int t = 0; t < 4; ++t) residual[t] += w * jump.dot(tests[t]);
            }
        }
        for (int t = 0; t < 4; ++t) {
            double r = std::abs(residual[t]);
            if (e.on_boundary()) {
                report.neumann_trace = std::max(report.neumann_trace, r);
            } else {
                report.side_jumps = std::max(report.side_jumps, r);
            }
        }
    }

    // Global weak symmetry: (P_h^R F^T, J(psi_v)) for every P1 hat.
    Eigen::VectorXd sym = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        double jac = 2.0 * mesh.area(tri);
        const auto& t = mesh.triangles[tri];
        for (size_t q = 0; q < trule.points.size(); ++q) {
            auto [b0, b1, b2] = trule.points[q];
            double w = trule.weights[q] * jac;
            Vec2 x = mesh.point(tri, b0, b1, b2);
            Mat2 F = in.field->deformation_gradient(tri, b0, b1, b2);
            Mat2 pft = rec.value(tri, x) * F.transpose();
            double skew = pft(0, 1) - pft(1, 0);
            auto hats = p1_values(b0, b1, b2);
            for (int i = 0; i < 3; ++i) sym[t[i]] += w * skew * hats[i];
        }
    }
    report.weak_symmetry = sym.lpNorm<Eigen::Infinity>();

    report.element_divergence /= report.scale;
    report.side_jumps /= report.scale;
    report.neumann_trace /= report.scale;
    report.weak_symmetry /= report.scale;
    return report;
}

} // namespace stresseq
