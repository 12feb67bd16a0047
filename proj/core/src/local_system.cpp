// SPDX-License-Identifier: Apache-2.0
#include "stresseq/local_system.hpp"

#include "stresseq/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>

namespace stresseq {

std::array<Vec2, 6> element_test_values(const PipelineInputs& in, TestSpaceVariant variant,
                                        int tri, double b0, double b1, double b2) {
    Vec2 x = in.mesh->point(tri, b0, b1, b2);
    Vec2 c = in.rt->center(tri);
    double h = in.rt->scale(tri);
    double xi = (x.x() - c.x()) / h;
    double eta = (x.y() - c.y()) / h;

    Vec2 rot;
    if (variant == TestSpaceVariant::Deformed) {
        Vec2 u = in.field->displacement(tri, b0, b1, b2);
        rot = Vec2(x.y() + u.y(), -(x.x() + u.x()));
    } else {
        rot = Vec2(x.y(), -x.x());
    }
    return {Vec2(1.0, 0.0), Vec2(0.0, 1.0), rot,
            Vec2(xi, 0.0),  Vec2(0.0, eta), Vec2(eta, xi)};
}

std::array<Vec2, 4> side_test_values(const PipelineInputs& in, TestSpaceVariant variant,
                                     int edge_id, double s) {
    const Edge& e = in.mesh->edges[edge_id];
    Vec2 x = (1.0 - s) * in.mesh->vertices[e.v0] + s * in.mesh->vertices[e.v1];
    Vec2 rot, pos;
    if (variant == TestSpaceVariant::Deformed) {
        auto bc = barycentric(*in.mesh, e.tri_minus, x);
        Vec2 u = in.field->displacement(e.tri_minus, bc[0], bc[1], bc[2]);
        rot = Vec2(x.y() + u.y(), -(x.x() + u.x()));
        pos = x + u;
    } else {
        rot = Vec2(x.y(), -x.x());
        pos = x;
    }
    return {Vec2(1.0, 0.0), Vec2(0.0, 1.0), rot, pos};
}

namespace {

double phi_on_edge(const Mesh& mesh, const VertexPatch& patch, int edge_id, double s) {
    const Edge& e = mesh.edges[edge_id];
    auto is_one = [&](int v) {
        return v == patch.center ||
               std::binary_search(patch.adopted.begin(), patch.adopted.end(), v);
    };
    double lo = is_one(e.v0) ? 1.0 : 0.0;
    double hi = is_one(e.v1) ? 1.0 : 0.0;
    return (1.0 - s) * lo + s * hi;
}

} // namespace

LocalSystem build_local_system(const PipelineInputs& in, const VertexPatch& patch,
                               const ProjectedStressField& stress, const ProjectedLoadField& load,
                               const SurfaceLoad& g, TestSpaceVariant variant) {
    const Mesh& mesh = *in.mesh;
    LocalSystem sys;
    sys.patch = &patch;
    sys.variant = variant;

    const int n_elems = static_cast<int>(patch.elements.size());
    const int n_sides = static_cast<int>(patch.constraint_sides.size());
    const int n_nodes = static_cast<int>(patch.nodes.size());
    sys.n_element_rows = 6 * n_elems;
    sys.n_side_rows = 4 * n_sides;
    sys.n_sym_rows = n_nodes;

    // Column map: all broken RT dofs of the patch, minus the edge dofs pinned
    // to zero on boundary(omega_z) \ boundary(Omega).
    sys.column_of.assign(n_elems, {});
    for (auto& per_elem : sys.column_of) {
        per_elem[0].fill(-1);
        per_elem[1].fill(-1);
    }
    for (int ei = 0; ei < n_elems; ++ei) {
        int tri = patch.elements[ei];
        for (int row = 0; row < 2; ++row) {
            for (int k = 0; k < 8; ++k) {
                if (k < 6) {
                    int edge = mesh.tri_edges[tri][k / 2];
                    if (std::binary_search(patch.zero_sides.begin(), patch.zero_sides.end(),
                                           edge)) {
                        continue;
                    }
                }
                sys.column_of[ei][row][k] = static_cast<int>(sys.columns.size());
                sys.columns.push_back({tri, row, k});
            }
        }
    }

    const int n_rows = sys.rows();
    const int n_cols = sys.cols();
    sys.C = Eigen::MatrixXd::Zero(n_rows, n_cols);
    sys.b = Eigen::VectorXd::Zero(n_rows);
    sys.M = Eigen::MatrixXd::Zero(n_cols, n_cols);
    sys.x_gram = Eigen::MatrixXd::Zero(n_nodes, n_nodes);

    const TriangleRule& trule = triangle_rule(kMaterialQuadOrder);
    const SegmentRule& erule = segment_rule(kEdgeQuadPoints);

    auto node_index = [&](int v) {
        auto it = std::lower_bound(patch.nodes.begin(), patch.nodes.end(), v);
        return static_cast<int>(it - patch.nodes.begin());
    };

    // Element contributions: divergence tests, weak-symmetry rows, objective
    // mass, multiplier Gram.
    for (int ei = 0; ei < n_elems; ++ei) {
        int tri = patch.elements[ei];
        double jac = 2.0 * mesh.area(tri);
        const auto& tverts = mesh.triangles[tri];

        for (size_t q = 0; q < trule.points.size(); ++q) {
            auto [b0, b1, b2] = trule.points[q];
            double w = trule.weights[q] * jac;
            Vec2 x = mesh.point(tri, b0, b1, b2);
            double phi = patch.phi(mesh, tri, b0, b1, b2);

            auto ztests = element_test_values(in, variant, tri, b0, b1, b2);
            Eigen::Matrix<double, 1, 8> divb = in.rt->basis_divergence(tri, x);
            Eigen::Matrix<double, 2, 8> valb = in.rt->basis_values(tri, x);

            Mat2 F = in.field->deformation_gradient(tri, b0, b1, b2);
            auto hats = p1_values(b0, b1, b2);

            // Divergence test rows.
            for (int t = 0; t < 6; ++t) {
                int row = sys.element_row(ei, t);
                for (int r = 0; r < 2; ++r) {
                    for (int k = 0; k < 8; ++k) {
                        int col = sys.column_of[ei][r][k];
                        if (col >= 0) sys.C(row, col) += w * divb[k] * ztests[t][r];
                    }
                }
            }
            // Data: -(fhat + div Phat) . z phi_z
            Vec2 data = load.value(tri, x) + stress.rt.divergence(tri, x);
            for (int t = 0; t < 6; ++t) {
                sys.b[sys.element_row(ei, t)] -= w * phi * data.dot(ztests[t]);
            }

            // Weak-symmetry rows: (Q F^T, J(psi)) with Q = e_r (x) basisfn.
            for (int lv = 0; lv < 3; ++lv) {
                int row = sys.sym_row(node_index(tverts[lv]));
                double psi = hats[lv];
                for (int k = 0; k < 8; ++k) {
                    Vec2 fq = F * valb.col(k);
                    int col0 = sys.column_of[ei][0][k];
                    int col1 = sys.column_of[ei][1][k];
                    if (col0 >= 0) sys.C(row, col0) += w * psi * fq[1];
                    if (col1 >= 0) sys.C(row, col1) -= w * psi * fq[0];
                }
                Mat2 phat_ft = stress.rt.value(tri, x) * F.transpose();
                sys.b[row] -= w * psi * phi * (phat_ft(0, 1) - phat_ft(1, 0));
            }

            // Objective mass (block diagonal over rows) and multiplier Gram.
            Eigen::Matrix<double, 8, 8> vv = valb.transpose() * valb;
            for (int r = 0; r < 2; ++r) {
                for (int k = 0; k < 8; ++k) {
                    int ck = sys.column_of[ei][r][k];
                    if (ck < 0) continue;
                    for (int l = 0; l < 8; ++l) {
                        int cl = sys.column_of[ei][r][l];
                        if (cl >= 0) sys.M(ck, cl) += w * vv(k, l);
                    }
                }
            }
            for (int a = 0; a < 3; ++a) {
                for (int bb = 0; bb < 3; ++bb) {
                    sys.x_gram(node_index(tverts[a]), node_index(tverts[bb])) +=
                        w * hats[a] * hats[bb];
                }
            }
        }
    }

    // Side contributions: jump moment tests.
    for (int si = 0; si < n_sides; ++si) {
        int edge_id = patch.constraint_sides[si];
        const Edge& e = mesh.edges[edge_id];
        bool neumann = e.on_boundary();

        int minus_idx = -1, plus_idx = -1;
        for (int ei = 0; ei < n_elems; ++ei) {
            if (patch.elements[ei] == e.tri_minus) minus_idx = ei;
            if (!neumann && patch.elements[ei] == e.tri_plus) plus_idx = ei;
        }

        auto local_edge = [&](int tri) {
            for (int le = 0; le < 3; ++le)
                if (mesh.tri_edges[tri][le] == edge_id) return le;
            throw Error("INTERNAL", "edge not found in triangle");
        };

        for (size_t q = 0; q < erule.points.size(); ++q) {
            double s = erule.points[q];
            double w = erule.weights[q] * e.length;
            double phi = phi_on_edge(mesh, patch, edge_id, s);
            auto ztests = side_test_values(in, variant, edge_id, s);

            // Trace of basis functions: 1 for the mean dof, (2s-1) for the
            // linear dof of this edge, 0 for all others.
            double tr_mean = 1.0;
            double tr_lin = 2.0 * s - 1.0;

            for (int t = 0; t < 4; ++t) {
                int row = sys.side_row(si, t);
                for (int r = 0; r < 2; ++r) {
                    if (minus_idx >= 0) {
                        int le = local_edge(e.tri_minus);
                        int c0 = sys.column_of[minus_idx][r][2 * le];
                        int c1 = sys.column_of[minus_idx][r][2 * le + 1];
                        if (c0 >= 0) sys.C(row, c0) += w * tr_mean * ztests[t][r];
                        if (c1 >= 0) sys.C(row, c1) += w * tr_lin * ztests[t][r];
                    }
                    if (plus_idx >= 0) {
                        int le = local_edge(e.tri_plus);
                        int c0 = sys.column_of[plus_idx][r][2 * le];
                        int c1 = sys.column_of[plus_idx][r][2 * le + 1];
                        if (c0 >= 0) sys.C(row, c0) -= w * tr_mean * ztests[t][r];
                        if (c1 >= 0) sys.C(row, c1) -= w * tr_lin * ztests[t][r];
                    }
                }
            }

            if (neumann) {
                // Auxiliary jump: the projected trace minus the load.
                Vec2 x = (1.0 - s) * mesh.vertices[e.v0] + s * mesh.vertices[e.v1];
                Vec2 trace = stress.rt.normal_trace(e.tri_minus, edge_id, s);
                Vec2 gval = g(x);
                for (int t = 0; t < 4; ++t) {
                    int row = sys.side_row(si, t);
                    sys.b[row] -= w * phi * (trace - gval).dot(ztests[t]);
                }
            } else {
                Vec2 jump = stress.rt.jump(edge_id, s);
                for (int t = 0; t < 4; ++t) {
                    sys.b[sys.side_row(si, t)] -= w * phi * jump.dot(ztests[t]);
                }
            }
        }
    }

    return sys;
}

Eigen::MatrixXd predicted_adjoint_null(const PipelineInputs& in, const LocalSystem& system) {
    const VertexPatch& patch = *system.patch;
    if (patch.kind == PatchKind::Dirichlet) return Eigen::MatrixXd(system.rows(), 0);

    const Mesh& mesh = *in.mesh;
    auto modes = rigid_mode_basis();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(system.rows(), 3);
    const int n_elems = static_cast<int>(patch.elements.size());
    const int n_sides = static_cast<int>(patch.constraint_sides.size());

    for (int m = 0; m < 3; ++m) {
        const RigidMode& mode = modes[m];
        Eigen::Vector3d coeff(mode.translation.x(), mode.translation.y(), mode.theta);

        if (system.variant == TestSpaceVariant::Deformed) {
            // The mode is exactly the span of the first three test functions.
            for (int ei = 0; ei < n_elems; ++ei) {
                for (int t = 0; t < 3; ++t) out(system.element_row(ei, t), m) = coeff[t];
            }
            for (int si = 0; si < n_sides; ++si) {
                for (int t = 0; t < 3; ++t) out(system.side_row(si, t), m) = -coeff[t];
            }
        } else {
            // Undeformed spaces: use the L2 projections of the deformed mode.
            const TriangleRule& trule = triangle_rule(kMaterialQuadOrder);
            for (int ei = 0; ei < n_elems; ++ei) {
                int tri = patch.elements[ei];
                double jac = 2.0 * mesh.area(tri);
                Eigen::Matrix<double, 6, 6> gram = Eigen::Matrix<double, 6, 6>::Zero();
                Eigen::Matrix<double, 6, 1> mom = Eigen::Matrix<double, 6, 1>::Zero();
                for (size_t q = 0; q < trule.points.size(); ++q) {
                    auto [b0, b1, b2] = trule.points[q];
                    double w = trule.weights[q] * jac;
                    auto tests = element_test_values(in, system.variant, tri, b0, b1, b2);
                    Vec2 rho = mode.deformed(*in.field, tri, b0, b1, b2);
                    for (int a = 0; a < 6; ++a) {
                        mom[a] += w * rho.dot(tests[a]);
                        for (int c = 0; c < 6; ++c) gram(a, c) += w * tests[a].dot(tests[c]);
                    }
                }
                Eigen::Matrix<double, 6, 1> z = gram.ldlt().solve(mom);
                for (int t = 0; t < 6; ++t) out(system.element_row(ei, t), m) = z[t];
            }
            const SegmentRule& erule = segment_rule(kEdgeQuadPoints);
            for (int si = 0; si < n_sides; ++si) {
                int edge_id = patch.constraint_sides[si];
                const Edge& e = mesh.edges[edge_id];
                Eigen::Matrix4d gram = Eigen::Matrix4d::Zero();
                Eigen::Vector4d mom = Eigen::Vector4d::Zero();
                for (size_t q = 0; q < erule.points.size(); ++q) {
                    double s = erule.points[q];
                    double w = erule.weights[q] * e.length;
                    auto tests = side_test_values(in, system.variant, edge_id, s);
                    Vec2 x = (1.0 - s) * mesh.vertices[e.v0] + s * mesh.vertices[e.v1];
                    auto bc = barycentric(mesh, e.tri_minus, x);
                    Vec2 rho = mode.deformed(*in.field, e.tri_minus, bc[0], bc[1], bc[2]);
                    for (int a = 0; a < 4; ++a) {
                        mom[a] += w * rho.dot(tests[a]);
                        for (int c = 0; c < 4; ++c) gram(a, c) += w * tests[a].dot(tests[c]);
                    }
                }
                Eigen::Vector4d sc = gram.ldlt().solve(mom);
                for (int t = 0; t < 4; ++t) out(system.side_row(si, t), m) = -sc[t];
            }
        }

        for (int ni = 0; ni < system.n_sym_rows; ++ni) {
            out(system.sym_row(ni), m) = mode.theta;
        }
    }
    return out;
}

double check_compatibility(const PipelineInputs& in, const LocalSystem& system) {
    if (system.patch->kind == PatchKind::Dirichlet) return 0.0;
    double b_norm = system.b.norm();
    if (b_norm == 0.0) return 0.0;
    Eigen::MatrixXd null_vectors = predicted_adjoint_null(in, system);
    double worst = 0.0;
    for (int m = 0; m < null_vectors.cols(); ++m) {
        double y_norm = null_vectors.col(m).norm();
        worst = std::max(worst, std::abs(null_vectors.col(m).dot(system.b)) / (y_norm * b_norm));
    }
    return worst;
}

PatchSolution solve_patch(const LocalSystem& system, bool allow_incompatible) {
    ConstrainedMinNorm sol = solve_constrained_min_norm(system.C, system.b, system.M, 1e-10);

    int predicted = (system.patch->kind == PatchKind::Interior) ? 3 : 0;
    if (sol.left_null_dim != predicted)
        throw Error("NULLSPACE_MISMATCH",
                    "patch " + std::to_string(system.patch->center) + ": adjoint null dim " +
                        std::to_string(sol.left_null_dim) + ", predicted " +
                        std::to_string(predicted));

    double scale = std::max(system.b.norm(), 1e-30);
    if (!allow_incompatible && sol.incompatibility > 1e-9 * system.b.norm() &&
        sol.incompatibility > 1e-14)
        throw Error("INCOMPATIBLE_RHS",
                    "patch " + std::to_string(system.patch->center) + ": distance to range " +
                        std::to_string(sol.incompatibility / scale));

    PatchSolution out;
    out.constraint_residual = (system.C * sol.x - system.b).norm() / (1.0 + system.b.norm());
    out.solution = std::move(sol);
    return out;
}

double numerical_infsup(const LocalSystem& system) {
    const int n_top = system.n_element_rows + system.n_side_rows;
    Eigen::MatrixXd top = system.C.topRows(n_top);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(top, Eigen::ComputeFullV);
    double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()[i] > 1e-12 * smax) ++rank;
    }
    Eigen::MatrixXd kernel = svd.matrixV().rightCols(system.cols() - rank);
    if (kernel.cols() == 0) return 0.0;

    Eigen::MatrixXd sym = system.C.bottomRows(system.n_sym_rows);
    Eigen::MatrixXd B = sym * kernel;

    // Normalize by the L2 norms on both sides.
    Eigen::LLT<Eigen::MatrixXd> lk((kernel.transpose() * system.M * kernel).eval());
    Eigen::LLT<Eigen::MatrixXd> lx(system.x_gram);
    Eigen::MatrixXd B1 = lx.matrixL().solve(B);
    Eigen::MatrixXd Bt = lk.matrixL().solve(B1.transpose()).transpose();

    Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(Bt);
    const auto& sv = bsvd.singularValues();
    double top_sv = sv.size() ? sv[0] : 0.0;
    double beta = 0.0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv[i] > 1e-10 * top_sv) beta = sv[i];
    }
    return beta;
}

void accumulate_correction(const LocalSystem& system, const Eigen::VectorXd& x,
                           BrokenRTStress& correction) {
    for (size_t c = 0; c < system.columns.size(); ++c) {
        const auto& col = system.columns[c];
        correction.dof(col.tri, col.row, col.dof) += x[c];
    }
}

} // namespace stresseq
