// SPDX-License-Identifier: Apache-2.0
#include "stresseq/assembly.hpp"
#include "stresseq/quadrature.hpp"
#include "stresseq/rt_stress.hpp"
#include "stresseq/taylor_hood.hpp"

#include <doctest.h>

#include <Eigen/LU>

#include <random>

using namespace stresseq;

namespace {

std::array<double, 3> random_bary(std::mt19937& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double b1 = unif(rng), b2 = unif(rng) * (1.0 - b1);
    return {1.0 - b1 - b2, b1, b2};
}

} // namespace

TEST_CASE("p2 basis has the Lagrange property at its nodes") {
    Mesh m = build_cook_mesh(1);
    TaylorHoodSpace space(m);
    // Vertex nodes: barycentric unit vectors; midpoints: permutations of (0,.5,.5).
    std::array<std::array<double, 3>, 6> node_bary = {{{1, 0, 0},
                                                       {0, 1, 0},
                                                       {0, 0, 1},
                                                       {0, 0.5, 0.5},
                                                       {0.5, 0, 0.5},
                                                       {0.5, 0.5, 0}}};
    for (int n = 0; n < 6; ++n) {
        auto vals = p2_values(node_bary[n][0], node_bary[n][1], node_bary[n][2]);
        for (int i = 0; i < 6; ++i) {
            CHECK(vals[i] == doctest::Approx(i == n ? 1.0 : 0.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("p2 partition of unity and gradient consistency") {
    Mesh m = build_cook_mesh(1);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto [b0, b1, b2] = random_bary(rng);
        auto vals = p2_values(b0, b1, b2);
        double sum = 0.0;
        for (double v : vals) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

        int tri = trial % m.num_triangles();
        auto grads = p2_gradients(m, tri, b0, b1, b2);
        Vec2 gsum = Vec2::Zero();
        for (const Vec2& g : grads) gsum += g;
        CHECK(gsum.norm() <= 1e-13);
    }
}

TEST_CASE("p2 interpolation reproduces the gradient of a linear function") {
    Mesh m = build_cook_mesh(1);
    TaylorHoodSpace space(m);
    // Interpolate u(x) = (x1, 3 x1 - 2 x2) at the P2 nodes.
    DisplacementPressureField f = DisplacementPressureField::zero(space);
    for (int n = 0; n < space.num_p2_nodes(); ++n) {
        Vec2 x = space.node_position(n);
        f.u[2 * n] = x.x();
        f.u[2 * n + 1] = 3.0 * x.x() - 2.0 * x.y();
    }
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        int tri = trial % m.num_triangles();
        auto [b0, b1, b2] = random_bary(rng);
        Mat2 g = f.displacement_gradient(tri, b0, b1, b2);
        Mat2 expected;
        expected << 1, 0, 3, -2;
        CHECK((g - expected).norm() <= 1e-12);
    }
}

TEST_CASE("dirichlet nodes are exactly the Gamma_D vertex and midpoint nodes") {
    Mesh m = build_cook_mesh(2);
    TaylorHoodSpace space(m);
    int count = 0;
    for (int n = 0; n < space.num_p2_nodes(); ++n) {
        if (space.node_on_dirichlet(n)) {
            ++count;
            CHECK(space.node_position(n).x() == doctest::Approx(0.0).epsilon(1e-15));
        }
    }
    // Left segment at level 2: 4 base refinements -> 2^2 intervals per base
    // edge pair; count = vertices + midpoints on x = 0 touching Dirichlet edges.
    CHECK(count > 0);
    CHECK(static_cast<int>(space.dirichlet_dofs().size()) == 2 * count);
}

TEST_CASE("rt dof/basis duality is the identity") {
    Mesh m = build_cook_mesh(1);
    RTBasisTable table(m);
    for (int tri : {0, 5, 11}) {
        for (int j = 0; j < 8; ++j) {
            auto basis_j = [&](const Vec2& x) -> Vec2 {
                return table.basis_values(tri, x).col(j);
            };
            Eigen::Matrix<double, 8, 1> dofs = table.dof_functionals(tri, basis_j);
            for (int i = 0; i < 8; ++i) {
                CHECK(std::abs(dofs[i] - (i == j ? 1.0 : 0.0)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("rt basis divergence lies in P1") {
    Mesh m = build_cook_mesh(1);
    RTBasisTable table(m);
    int tri = 3;
    // Fit a linear polynomial to the divergence at 3 points, check at others.
    std::array<Vec2, 3> fit_pts;
    for (int i = 0; i < 3; ++i) fit_pts[i] = m.point(tri, i == 0, i == 1, i == 2);
    for (int j = 0; j < 8; ++j) {
        Eigen::Matrix3d A;
        Eigen::Vector3d rhs;
        for (int i = 0; i < 3; ++i) {
            A.row(i) << 1.0, fit_pts[i].x(), fit_pts[i].y();
            rhs[i] = table.basis_divergence(tri, fit_pts[i])[j];
        }
        Eigen::Vector3d c = A.fullPivLu().solve(rhs);
        std::mt19937 rng(11 + j);
        for (int trial = 0; trial < 5; ++trial) {
            auto [b0, b1, b2] = random_bary(rng);
            Vec2 x = m.point(tri, b0, b1, b2);
            double expect = c[0] + c[1] * x.x() + c[2] * x.y();
            CHECK(table.basis_divergence(tri, x)[j] == doctest::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("divergence theorem holds for every rt basis function") {
    Mesh m = build_cook_mesh(1);
    RTBasisTable table(m);
    const TriangleRule& trule = triangle_rule(4);
    const SegmentRule& erule = segment_rule(5);
    for (int tri : {0, 7}) {
        double jac = 2.0 * m.area(tri);
        for (int j = 0; j < 8; ++j) {
            double vol = 0.0;
            for (size_t q = 0; q < trule.points.size(); ++q) {
                auto [b0, b1, b2] = trule.points[q];
                Vec2 x = m.point(tri, b0, b1, b2);
                vol += trule.weights[q] * jac * table.basis_divergence(tri, x)[j];
            }
            double surf = 0.0;
            for (int le = 0; le < 3; ++le) {
                const Edge& e = m.edges[m.tri_edges[tri][le]];
                // Outward normal w.r.t. this triangle.
                double sign = 1.0;
                if (!e.on_boundary() && e.tri_plus == tri) sign = -1.0;
                for (size_t q = 0; q < erule.points.size(); ++q) {
                    double s = erule.points[q];
                    Vec2 x = (1.0 - s) * m.vertices[e.v0] + s * m.vertices[e.v1];
                    surf += sign * erule.weights[q] * e.length *
                            e.normal.dot(table.basis_values(tri, x).col(j));
                }
            }
            CHECK(vol == doctest::Approx(surf).epsilon(1e-10));
        }
    }
}

TEST_CASE("edge basis functions have unit mean on their edge, zero on others") {
    Mesh m = build_cook_mesh(1);
    RTBasisTable table(m);
    const SegmentRule& erule = segment_rule(5);
    int tri = 2;
    for (int le = 0; le < 3; ++le) {
        for (int other = 0; other < 3; ++other) {
            const Edge& e = m.edges[m.tri_edges[tri][other]];
            double mean = 0.0;
            for (size_t q = 0; q < erule.points.size(); ++q) {
                double s = erule.points[q];
                Vec2 x = (1.0 - s) * m.vertices[e.v0] + s * m.vertices[e.v1];
                mean += erule.weights[q] * e.normal.dot(table.basis_values(tri, x).col(2 * le));
            }
            CHECK(mean == doctest::Approx(other == le ? 1.0 : 0.0).epsilon(1e-11));
        }
    }
}

TEST_CASE("constant tensor interpolates exactly with zero jumps") {
    Mesh m = build_cook_mesh(1);
    RTBasisTable table(m);
    Mat2 A;
    A << 1.5, -0.25, 0.75, 2.0;
    std::vector<ElementP1Tensor> p1(m.num_triangles());
    for (auto& e : p1) e.c0 = A;
    BrokenRTStress s = BrokenRTStress::from_p1(table, p1);

    std::mt19937 rng(5);
    for (int tri = 0; tri < m.num_triangles(); ++tri) {
        auto [b0, b1, b2] = random_bary(rng);
        Vec2 x = m.point(tri, b0, b1, b2);
        CHECK((s.value(tri, x) - A).norm() <= 1e-12);
        CHECK(s.divergence(tri, x).norm() <= 1e-11);
    }
    for (int ei = 0; ei < m.num_edges(); ++ei) {
        const Edge& e = m.edges[ei];
        for (double sp : {0.2, 0.8}) {
            if (e.on_boundary()) {
                CHECK((s.jump(ei, sp) - A * e.normal).norm() <= 1e-12);
            } else {
                CHECK(s.jump(ei, sp).norm() <= 1e-12);
            }
        }
    }
}

TEST_CASE("conforming field built from shared edge dofs has zero jumps") {
    Mesh m = build_cook_mesh(1);
    RTBasisTable table(m);
    BrokenRTStress s = BrokenRTStress::zero(table);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    // Shared per-edge trace coefficients, independent interior dofs.
    std::vector<std::array<double, 4>> edge_dofs(m.num_edges());
    for (auto& d : edge_dofs) {
        for (double& v : d) v = unif(rng);
    }
    for (int tri = 0; tri < m.num_triangles(); ++tri) {
        for (int le = 0; le < 3; ++le) {
            int edge = m.tri_edges[tri][le];
            for (int row = 0; row < 2; ++row) {
                s.dof(tri, row, 2 * le) = edge_dofs[edge][2 * row];
                s.dof(tri, row, 2 * le + 1) = edge_dofs[edge][2 * row + 1];
            }
        }
        for (int row = 0; row < 2; ++row) {
            s.dof(tri, row, 6) = unif(rng);
            s.dof(tri, row, 7) = unif(rng);
        }
    }
    for (int ei = 0; ei < m.num_edges(); ++ei) {
        if (m.edges[ei].on_boundary()) continue;
        for (double sp : {0.1, 0.5, 0.9}) {
            CHECK(s.jump(ei, sp).norm() <= 1e-12);
        }
    }
    // Sign flip: trace w.r.t. -n is the negated trace w.r.t. n (the trace is
    // linear in the normal by construction of the dofs).
    int interior = -1;
    for (int ei = 0; ei < m.num_edges(); ++ei) {
        if (!m.edges[ei].on_boundary()) interior = ei;
    }
    REQUIRE(interior >= 0);
    const Edge& e = m.edges[interior];
    Vec2 tr = s.normal_trace(e.tri_minus, interior, 0.3);
    Mat2 val = s.value(e.tri_minus,
                       (1.0 - 0.3) * m.vertices[e.v0] + 0.3 * m.vertices[e.v1]);
    CHECK(((val * (-e.normal)) + tr).norm() <= 1e-12);
}
