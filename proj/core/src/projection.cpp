// SPDX-License-Identifier: Apache-2.0
#include "stresseq/projection.hpp"

#include "stresseq/min_norm.hpp"
#include "stresseq/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace stresseq {

namespace {

// P1 monomials {1, xi, eta} in the centered coordinates of the element.
inline Eigen::Vector3d p1_monomials(const RTBasisTable& rt, int tri, const Vec2& x) {
    Vec2 c = rt.center(tri);
    double h = rt.scale(tri);
    return Eigen::Vector3d(1.0, (x.x() - c.x()) / h, (x.y() - c.y()) / h);
}

inline Eigen::Matrix<double, 6, 1> p2_monomials(const RTBasisTable& rt, int tri, const Vec2& x) {
    Eigen::Vector3d m = p1_monomials(rt, tri, x);
    Eigen::Matrix<double, 6, 1> out;
    out << 1.0, m[1], m[2], m[1] * m[1], m[1] * m[2], m[2] * m[2];
    return out;
}

// Unknown ordering within an element: component (r,c) major, monomial minor.
inline int coef_index(int r, int c, int k) { return 3 * (2 * r + c) + k; }

ElementP1Tensor tensor_from_coeffs(const Eigen::VectorXd& c, int offset) {
    ElementP1Tensor out;
    for (int r = 0; r < 2; ++r) {
        for (int cc = 0; cc < 2; ++cc) {
            out.c0(r, cc) = c[offset + coef_index(r, cc, 0)];
            out.cx(r, cc) = c[offset + coef_index(r, cc, 1)];
            out.cy(r, cc) = c[offset + coef_index(r, cc, 2)];
        }
    }
    return out;
}

} // namespace

ProjectedLoadField ProjectedLoadField::zero(const RTBasisTable& rt_table) {
    ProjectedLoadField f;
    f.rt = &rt_table;
    f.coeffs.assign(rt_table.mesh().num_triangles(), Eigen::Matrix<double, 2, 6>::Zero());
    return f;
}

Vec2 ProjectedLoadField::value(int tri, const Vec2& x) const {
    Eigen::Matrix<double, 6, 1> m = p2_monomials(*rt, tri, x);
    return coeffs[tri] * m;
}

ElementP1Tensor naive_project_stress(const PipelineInputs& in, int tri) {
    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);
    double jac = 2.0 * in.mesh->area(tri);

    Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
    Eigen::Matrix<double, 3, 4> rhs = Eigen::Matrix<double, 3, 4>::Zero();
    for (size_t q = 0; q < rule.points.size(); ++q) {
        auto [b0, b1, b2] = rule.points[q];
        double w = rule.weights[q] * jac;
        Vec2 x = in.mesh->point(tri, b0, b1, b2);
        Eigen::Vector3d m = p1_monomials(*in.rt, tri, x);
        gram += w * m * m.transpose();
        Mat2 P = in.stress_at(tri, b0, b1, b2);
        Eigen::Vector4d pv(P(0, 0), P(0, 1), P(1, 0), P(1, 1));
        rhs += w * m * pv.transpose();
    }
    Eigen::Matrix<double, 3, 4> sol = gram.ldlt().solve(rhs);
    ElementP1Tensor out;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            out.c0(r, c) = sol(0, 2 * r + c);
            out.cx(r, c) = sol(1, 2 * r + c);
            out.cy(r, c) = sol(2, 2 * r + c);
        }
    }
    return out;
}

Eigen::Matrix<double, 2, 6> compatible_project_load(const PipelineInputs& in, int tri,
                                                    const VolumeLoad& f) {
    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);
    double jac = 2.0 * in.mesh->area(tri);
    auto modes = rigid_mode_basis();

    std::vector<int> centers;
    for (int p : in.patches->patches_on_element[tri]) {
        if (in.patches->patches[p].kind == PatchKind::Interior) centers.push_back(p);
    }
    const int n_rows = 3 * static_cast<int>(centers.size());

    auto idx = [](int r, int k) { return 6 * r + k; };

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_rows, 12);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_rows);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(12, 12);
    Eigen::VectorXd rhs_ls = Eigen::VectorXd::Zero(12);

    for (size_t q = 0; q < rule.points.size(); ++q) {
        auto [b0, b1, b2] = rule.points[q];
        double w = rule.weights[q] * jac;
        Vec2 x = in.mesh->point(tri, b0, b1, b2);
        Eigen::Matrix<double, 6, 1> mono = p2_monomials(*in.rt, tri, x);
        Vec2 fx = f(x);

        Eigen::Matrix<double, 6, 6> mm = w * mono * mono.transpose();
        M.block<6, 6>(0, 0) += mm;
        M.block<6, 6>(6, 6) += mm;
        rhs_ls.segment<6>(0) += w * fx.x() * mono;
        rhs_ls.segment<6>(6) += w * fx.y() * mono;

        for (size_t zi = 0; zi < centers.size(); ++zi) {
            const VertexPatch& patch = in.patches->patches[centers[zi]];
            double phi = patch.phi(*in.mesh, tri, b0, b1, b2);
            for (int mi = 0; mi < 3; ++mi) {
                const RigidMode& mode = modes[mi];
                Vec2 rho = mode.deformed(*in.field, tri, b0, b1, b2);
                Vec2 rho0 = mode.undeformed(x);
                int row = static_cast<int>(3 * zi) + mi;
                for (int r = 0; r < 2; ++r) {
                    for (int k = 0; k < 6; ++k) {
                        A(row, idx(r, k)) += w * mono[k] * rho[r] * phi;
                    }
                }
                b[row] += w * phi * fx.dot(rho0);
            }
        }
    }

    Eigen::VectorXd target = M.ldlt().solve(rhs_ls);
    ConstrainedMinNorm sol = solve_constrained_min_norm(A, b, M, target, 1e-10);
    if (sol.incompatibility > 1e-10 * (1.0 + b.norm()))
        throw Error("RANK_DEFICIENT_CONSTRAINTS",
                    "load projection on element " + std::to_string(tri));

    Eigen::Matrix<double, 2, 6> out;
    for (int r = 0; r < 2; ++r) {
        for (int k = 0; k < 6; ++k) out(r, k) = sol.x[idx(r, k)];
    }
    return out;
}

namespace {

// Per-interior-patch boundary term of the rotation condition:
// <g, phi_z (rho3 - rho3_0)>_{Gamma_N \cap closure(omega_z)} with
// rho3 - rho3_0 = (u_2, -u_1) on the edge.
std::vector<double> rotation_boundary_terms(const PipelineInputs& in, const SurfaceLoad& g) {
    const Mesh& mesh = *in.mesh;
    const PatchSet& patches = *in.patches;
    const SegmentRule& erule = segment_rule(kEdgeQuadPoints);
    std::vector<double> out(patches.patches.size(), 0.0);
    for (size_t pi = 0; pi < patches.patches.size(); ++pi) {
        const VertexPatch& patch = patches.patches[pi];
        if (patch.kind != PatchKind::Interior) continue;
        for (int edge_id : patch.constraint_sides) {
            const Edge& e = mesh.edges[edge_id];
            if (!e.on_boundary()) continue;
            for (size_t q = 0; q < erule.points.size(); ++q) {
                double s = erule.points[q];
                double w = erule.weights[q] * e.length;
                Vec2 x = (1.0 - s) * mesh.vertices[e.v0] + s * mesh.vertices[e.v1];
                Vec2 gval = g(x);
                if (gval.isZero()) continue;
                auto bc = barycentric(mesh, e.tri_minus, x);
                double phi = patch.phi(mesh, e.tri_minus, bc[0], bc[1], bc[2]);
                Vec2 u = in.field->displacement(e.tri_minus, bc[0], bc[1], bc[2]);
                out[pi] += w * phi * gval.dot(Vec2(u.y(), -u.x()));
            }
        }
    }
    return out;
}

ProjectedStressField project_stress_compatible(const PipelineInputs& in, const SurfaceLoad& g) {
    const Mesh& mesh = *in.mesh;
    const PatchSet& patches = *in.patches;
    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);
    auto modes = rigid_mode_basis();
    const RigidMode& rotation = modes[2];
    const int nt = mesh.num_triangles();

    // Per-element targets (naive projections), mass blocks, and inverses.
    Eigen::VectorXd target(12 * nt);
    std::vector<Eigen::Matrix<double, 12, 12>> mass(nt), mass_inv(nt);

    // Sparse constraint system.
    std::vector<Eigen::Triplet<double>> a_triplets;
    std::vector<double> rhs_rows;
    auto add_row = [&](int tri, const Eigen::Matrix<double, 1, 12>& a, double rhs) {
        int row = static_cast<int>(rhs_rows.size());
        for (int k = 0; k < 12; ++k) {
            if (a[k] != 0.0) a_triplets.emplace_back(row, 12 * tri + k, a[k]);
        }
        rhs_rows.push_back(rhs);
    };

    // Patch rotation rows are accumulated element by element.
    std::vector<Eigen::Matrix<double, 1, 12>> patch_row_blocks; // per (patch, tri) slot
    struct PatchSlot {
        int patch;
        int tri;
        int block;
    };
    std::vector<PatchSlot> patch_slots;
    std::vector<double> patch_rhs = rotation_boundary_terms(in, g);

    for (int tri = 0; tri < nt; ++tri) {
        double jac = 2.0 * mesh.area(tri);

        Eigen::Matrix<double, 12, 12> m = Eigen::Matrix<double, 12, 12>::Zero();
        Eigen::Matrix<double, 12, 1> ls = Eigen::Matrix<double, 12, 1>::Zero();

        std::vector<int> interior, covering = patches.patches_on_element[tri];
        for (int p : covering) {
            if (patches.patches[p].kind == PatchKind::Interior) interior.push_back(p);
        }
        bool all_interior = interior.size() == covering.size();
        // Keep an independent subset of translation rows: the hat gradients
        // of all covering centers sum to zero, so drop one row when every
        // covering patch contributes.
        size_t keep = all_interior && !interior.empty() ? interior.size() - 1 : interior.size();

        std::vector<Eigen::Matrix<double, 1, 12>> trans_rows(2 * keep,
                                                             Eigen::Matrix<double, 1, 12>::Zero());
        std::vector<double> trans_rhs(2 * keep, 0.0);
        std::vector<Eigen::Matrix<double, 1, 12>> rot_blocks(
            interior.size(), Eigen::Matrix<double, 1, 12>::Zero());

        for (size_t q = 0; q < rule.points.size(); ++q) {
            auto [b0, b1, b2] = rule.points[q];
            double w = rule.weights[q] * jac;
            Vec2 x = mesh.point(tri, b0, b1, b2);
            Eigen::Vector3d mono = p1_monomials(*in.rt, tri, x);
            Mat2 P = in.stress_at(tri, b0, b1, b2);

            Eigen::Matrix3d mm = w * mono * mono.transpose();
            for (int rc = 0; rc < 4; ++rc) m.block<3, 3>(3 * rc, 3 * rc) += mm;
            for (int r = 0; r < 2; ++r) {
                for (int c = 0; c < 2; ++c) {
                    for (int k = 0; k < 3; ++k) ls[coef_index(r, c, k)] += w * mono[k] * P(r, c);
                }
            }

            Vec2 rho3 = rotation.deformed(*in.field, tri, b0, b1, b2);
            Vec2 rho3_0 = rotation.undeformed(x);

            for (size_t zi = 0; zi < interior.size(); ++zi) {
                const VertexPatch& patch = patches.patches[interior[zi]];
                Vec2 gphi = patch.phi_gradient(mesh, tri);
                double phi = patch.phi(mesh, tri, b0, b1, b2);

                if (zi < keep) {
                    for (int comp = 0; comp < 2; ++comp) {
                        auto& row = trans_rows[2 * zi + comp];
                        for (int c = 0; c < 2; ++c) {
                            for (int k = 0; k < 3; ++k) {
                                row[coef_index(comp, c, k)] += w * mono[k] * gphi[c];
                            }
                        }
                        trans_rhs[2 * zi + comp] += w * P.row(comp).dot(gphi);
                    }
                }

                auto& rot = rot_blocks[zi];
                for (int r = 0; r < 2; ++r) {
                    for (int c = 0; c < 2; ++c) {
                        for (int k = 0; k < 3; ++k) {
                            rot[coef_index(r, c, k)] += w * mono[k] * rho3[r] * gphi[c];
                        }
                    }
                }
                Mat2 test = phi * rotation.undeformed_gradient() + rho3_0 * gphi.transpose();
                patch_rhs[interior[zi]] += w * (P.array() * test.array()).sum();
            }
        }

        mass[tri] = m;
        mass_inv[tri] = m.ldlt().solve(Eigen::Matrix<double, 12, 12>::Identity());
        target.segment<12>(12 * tri) = m.ldlt().solve(ls);

        for (size_t k = 0; k < keep; ++k) {
            add_row(tri, trans_rows[2 * k], trans_rhs[2 * k]);
            add_row(tri, trans_rows[2 * k + 1], trans_rhs[2 * k + 1]);
        }
        for (size_t zi = 0; zi < interior.size(); ++zi) {
            patch_slots.push_back({interior[zi], tri, static_cast<int>(patch_row_blocks.size())});
            patch_row_blocks.push_back(rot_blocks[zi]);
        }
    }

    // Append one rotation row per interior patch.
    std::vector<int> patch_row_index(patches.patches.size(), -1);
    for (size_t p = 0; p < patches.patches.size(); ++p) {
        if (patches.patches[p].kind != PatchKind::Interior) continue;
        patch_row_index[p] = static_cast<int>(rhs_rows.size());
        rhs_rows.push_back(patch_rhs[p]);
    }
    for (const PatchSlot& slot : patch_slots) {
        int row = patch_row_index[slot.patch];
        const auto& a = patch_row_blocks[slot.block];
        for (int k = 0; k < 12; ++k) {
            if (a[k] != 0.0) a_triplets.emplace_back(row, 12 * slot.tri + k, a[k]);
        }
    }

    const int n_rows = static_cast<int>(rhs_rows.size());
    Eigen::SparseMatrix<double> A(n_rows, 12 * nt);
    A.setFromTriplets(a_triplets.begin(), a_triplets.end());
    Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs_rows.data(), n_rows);

    // Schur-complement solve of: min (c - t)' M (c - t) s.t. A c = b.
    Eigen::SparseMatrix<double> Minv(12 * nt, 12 * nt);
    {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<size_t>(nt) * 144);
        for (int tri = 0; tri < nt; ++tri) {
            for (int i = 0; i < 12; ++i) {
                for (int j = 0; j < 12; ++j) {
                    t.emplace_back(12 * tri + i, 12 * tri + j, mass_inv[tri](i, j));
                }
            }
        }
        Minv.setFromTriplets(t.begin(), t.end());
    }
    Eigen::SparseMatrix<double> At = A.transpose();
    Eigen::SparseMatrix<double> S = A * Minv * At;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(S);
    if (ldlt.info() != Eigen::Success)
        throw Error("RANK_DEFICIENT_CONSTRAINTS", "stress projection constraint system");
    Eigen::VectorXd lambda = ldlt.solve(A * target - b);
    Eigen::VectorXd c = target - Minv * (At * lambda);

    double residual = (A * c - b).norm();
    if (residual > 1e-9 * (1.0 + b.norm()))
        throw Error("RANK_DEFICIENT_CONSTRAINTS",
                    "stress projection constraints violated: " + std::to_string(residual));

    ProjectedStressField out;
    out.p1.resize(nt);
    for (int tri = 0; tri < nt; ++tri) out.p1[tri] = tensor_from_coeffs(c, 12 * tri);
    out.rt = BrokenRTStress::from_p1(*in.rt, out.p1);
    return out;
}

} // namespace

ProjectedStressField project_stress(const PipelineInputs& in, ProjectionMode mode,
                                    const SurfaceLoad& g) {
    if (mode == ProjectionMode::Compatible) return project_stress_compatible(in, g);
    ProjectedStressField out;
    out.p1.resize(in.mesh->num_triangles());
    for (int t = 0; t < in.mesh->num_triangles(); ++t) {
        out.p1[t] = naive_project_stress(in, t);
    }
    out.rt = BrokenRTStress::from_p1(*in.rt, out.p1);
    return out;
}

ProjectedLoadField project_load(const PipelineInputs& in, ProjectionMode mode,
                                const VolumeLoad& f) {
    ProjectedLoadField out = ProjectedLoadField::zero(*in.rt);
    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);
    for (int t = 0; t < in.mesh->num_triangles(); ++t) {
        if (mode == ProjectionMode::Compatible) {
            out.coeffs[t] = compatible_project_load(in, t, f);
        } else {
            // Plain least squares without moment constraints.
            double jac = 2.0 * in.mesh->area(t);
            Eigen::Matrix<double, 6, 6> gram = Eigen::Matrix<double, 6, 6>::Zero();
            Eigen::Matrix<double, 6, 2> rhs = Eigen::Matrix<double, 6, 2>::Zero();
            for (size_t q = 0; q < rule.points.size(); ++q) {
                auto [b0, b1, b2] = rule.points[q];
                double w = rule.weights[q] * jac;
                Vec2 x = in.mesh->point(t, b0, b1, b2);
                Eigen::Matrix<double, 6, 1> m = p2_monomials(*in.rt, t, x);
                gram += w * m * m.transpose();
                rhs += w * m * f(x).transpose();
            }
            Eigen::Matrix<double, 6, 2> sol = gram.ldlt().solve(rhs);
            out.coeffs[t] = sol.transpose();
        }
    }
    return out;
}

ProjectionResiduals stress_constraint_residual(const PipelineInputs& in,
                                               const ProjectedStressField& stress,
                                               const SurfaceLoad& g) {
    const Mesh& mesh = *in.mesh;
    const PatchSet& patches = *in.patches;
    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);
    auto modes = rigid_mode_basis();
    const RigidMode& rotation = modes[2];

    ProjectionResiduals out;
    std::vector<double> patch_lhs(patches.patches.size(), 0.0);
    std::vector<double> patch_rhs = rotation_boundary_terms(in, g);
    double scale_sq = 0.0;

    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        double jac = 2.0 * mesh.area(tri);
        const auto& covering = patches.patches_on_element[tri];
        std::vector<double> elem_res(2 * covering.size(), 0.0);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            auto [b0, b1, b2] = rule.points[q];
            double w = rule.weights[q] * jac;
            Vec2 x = mesh.point(tri, b0, b1, b2);
            Mat2 P = in.stress_at(tri, b0, b1, b2);
            Mat2 Phat = stress.value(tri, x);
            scale_sq += w * P.squaredNorm();

            Vec2 rho3 = rotation.deformed(*in.field, tri, b0, b1, b2);
            Vec2 rho3_0 = rotation.undeformed(x);

            for (size_t zi = 0; zi < covering.size(); ++zi) {
                const VertexPatch& patch = patches.patches[covering[zi]];
                if (patch.kind != PatchKind::Interior) continue;
                Vec2 gphi = patch.phi_gradient(mesh, tri);
                double phi = patch.phi(mesh, tri, b0, b1, b2);
                for (int comp = 0; comp < 2; ++comp) {
                    elem_res[2 * zi + comp] += w * (Phat - P).row(comp).dot(gphi);
                }
                patch_lhs[covering[zi]] +=
                    w * (Phat.array() * (rho3 * gphi.transpose()).array()).sum();
                Mat2 test = phi * rotation.undeformed_gradient() + rho3_0 * gphi.transpose();
                patch_rhs[covering[zi]] += w * (P.array() * test.array()).sum();
            }
        }
        for (double r : elem_res) {
            out.element_translations = std::max(out.element_translations, std::abs(r));
        }
    }

    double scale = 1.0 + std::sqrt(scale_sq);
    for (size_t p = 0; p < patches.patches.size(); ++p) {
        if (patches.patches[p].kind != PatchKind::Interior) continue;
        out.patch_rotation = std::max(out.patch_rotation, std::abs(patch_lhs[p] - patch_rhs[p]));
    }
    out.element_translations /= scale;
    out.patch_rotation /= scale;
    return out;
}

} // namespace stresseq
