// SPDX-License-Identifier: Apache-2.0
#include "stresseq/newton.hpp"
#include "stresseq/quadrature.hpp"

#include <doctest.h>

#include <random>

using namespace stresseq;

namespace {

// Random admissible state: smooth coefficients small enough for det F > 0.
DisplacementPressureField random_state(const TaylorHoodSpace& space, std::mt19937& rng,
                                       double amplitude) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    DisplacementPressureField f = DisplacementPressureField::zero(space);
    for (int i = 0; i < f.u.size(); ++i) f.u[i] = amplitude * unif(rng);
    for (int d : space.dirichlet_dofs()) f.u[d] = 0.0;
    for (int i = 0; i < f.p.size(); ++i) f.p[i] = amplitude * unif(rng);
    while (min_det_f(f) < 0.5) f.u *= 0.5;
    return f;
}

// Independently assembled small-strain saddle-point operator:
// 2 mu (eps(u), eps(v)) + (p, div v) + (div u, q)  (incompressible limit).
Eigen::MatrixXd stokes_like_operator(const TaylorHoodSpace& space, double mu) {
    const Mesh& mesh = space.mesh();
    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(space.num_dofs(), space.num_dofs());
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        double jac = 2.0 * mesh.area(tri);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            auto [b0, b1, b2] = rule.points[q];
            double w = rule.weights[q] * jac;
            auto grads = p2_gradients(mesh, tri, b0, b1, b2);
            auto pvals = p1_values(b0, b1, b2);
            for (int i = 0; i < 6; ++i) {
                int ni = space.p2_node(tri, i);
                for (int j = 0; j < 6; ++j) {
                    int nj = space.p2_node(tri, j);
                    for (int a = 0; a < 2; ++a) {
                        for (int c = 0; c < 2; ++c) {
                            // eps(e_a grad_i) : eps(e_c grad_j), doubled.
                            double val =
                                0.5 * ((a == c ? grads[i].dot(grads[j]) : 0.0) +
                                       grads[i][c] * grads[j][a]);
                            K(space.displacement_dof(ni, a), space.displacement_dof(nj, c)) +=
                                2.0 * mu * w * val;
                        }
                    }
                }
                for (int pj = 0; pj < 3; ++pj) {
                    int pd = space.pressure_dof(mesh.triangles[tri][pj]);
                    for (int a = 0; a < 2; ++a) {
                        K(space.displacement_dof(ni, a), pd) += w * pvals[pj] * grads[i][a];
                        K(pd, space.displacement_dof(ni, a)) += w * pvals[pj] * grads[i][a];
                    }
                }
            }
        }
    }
    for (int d : space.dirichlet_dofs()) {
        K.row(d).setZero();
        K.col(d).setZero();
        K(d, d) = 1.0;
    }
    return K;
}

} // namespace

TEST_CASE("zero load gives zero residual at the reference state") {
    Mesh mesh = build_cook_mesh(1);
    TaylorHoodSpace space(mesh);
    MaterialParams params{1.0}; // incompressible
    DisplacementPressureField f = DisplacementPressureField::zero(space);
    Eigen::VectorXd r = assemble_residual(f, params, cook_surface_load(0.0), zero_volume_load(),
                                          /*apply_dirichlet=*/true);
    CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("tangent matches finite-difference directional derivatives") {
    Mesh mesh = build_cook_mesh(1);
    TaylorHoodSpace space(mesh);
    std::mt19937 rng(3);

    for (MaterialParams params : {MaterialParams{1.0, 4.0}, MaterialParams{1.0}}) {
        DisplacementPressureField f = random_state(space, rng, 0.02);
        SurfaceLoad g = cook_surface_load(0.1);
        AssembledSystem sys = assemble_system(f, params, g, zero_volume_load());

        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        int nu = space.num_displacement_dofs();
        for (int dir = 0; dir < 20; ++dir) {
            Eigen::VectorXd d(space.num_dofs());
            for (int i = 0; i < d.size(); ++i) d[i] = unif(rng);
            for (int dd : space.dirichlet_dofs()) d[dd] = 0.0;

            double h = 1e-6;
            DisplacementPressureField fp = f, fm = f;
            fp.u += h * d.head(nu);
            fp.p += h * d.tail(space.num_pressure_dofs());
            fm.u -= h * d.head(nu);
            fm.p -= h * d.tail(space.num_pressure_dofs());
            Eigen::VectorXd fd =
                (assemble_residual(fp, params, g, zero_volume_load(), true) -
                 assemble_residual(fm, params, g, zero_volume_load(), true)) /
                (2.0 * h);
            Eigen::VectorXd lin = sys.tangent * d;
            CHECK((lin - fd).norm() <= 1e-6 * std::max(1.0, lin.norm()));
        }
    }
}

TEST_CASE("tangent at the reference state equals the Stokes-like operator") {
    Mesh mesh = build_cook_mesh(1);
    TaylorHoodSpace space(mesh);
    MaterialParams params{1.0}; // lambda = inf
    DisplacementPressureField f = DisplacementPressureField::zero(space);
    AssembledSystem sys = assemble_system(f, params, cook_surface_load(0.0), zero_volume_load());

    Eigen::MatrixXd dense = Eigen::MatrixXd(sys.tangent);
    Eigen::MatrixXd oracle = stokes_like_operator(space, params.mu);
    CHECK((dense - oracle).cwiseAbs().maxCoeff() <= 1e-11 * oracle.cwiseAbs().maxCoeff());
}

TEST_CASE("uu block of the tangent is symmetric at admissible states") {
    Mesh mesh = build_cook_mesh(1);
    TaylorHoodSpace space(mesh);
    MaterialParams params{1.0};
    std::mt19937 rng(11);
    DisplacementPressureField f = random_state(space, rng, 0.02);
    AssembledSystem sys = assemble_system(f, params, cook_surface_load(0.1), zero_volume_load());
    int nu = space.num_displacement_dofs();
    Eigen::MatrixXd uu = Eigen::MatrixXd(sys.tangent).topLeftCorner(nu, nu);
    CHECK((uu - uu.transpose()).cwiseAbs().maxCoeff() <=
          1e-10 * uu.cwiseAbs().maxCoeff());
}

TEST_CASE("energy directional derivative matches the displacement residual (finite lambda)") {
    Mesh mesh = build_cook_mesh(1);
    TaylorHoodSpace space(mesh);
    MaterialParams params{1.1, 3.0};
    std::mt19937 rng(13);
    DisplacementPressureField f = random_state(space, rng, 0.02);
    f.p.setZero();

    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);
    auto total_energy = [&](const DisplacementPressureField& state) {
        double e = 0.0;
        for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
            double jac = 2.0 * mesh.area(tri);
            for (size_t q = 0; q < rule.points.size(); ++q) {
                auto [b0, b1, b2] = rule.points[q];
                Mat2 F = state.deformation_gradient(tri, b0, b1, b2);
                e += rule.weights[q] * jac * energy_nh(F * F.transpose(), params);
            }
        }
        return e;
    };

    // Displacement-only residual: (P_Eq3(u), grad v).
    Eigen::VectorXd r = Eigen::VectorXd::Zero(space.num_displacement_dofs());
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        double jac = 2.0 * mesh.area(tri);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            auto [b0, b1, b2] = rule.points[q];
            double w = rule.weights[q] * jac;
            Mat2 P = piola_stress(f.deformation_gradient(tri, b0, b1, b2), params);
            auto grads = p2_gradients(mesh, tri, b0, b1, b2);
            for (int i = 0; i < 6; ++i) {
                int node = space.p2_node(tri, i);
                r[2 * node] += w * P.row(0).dot(grads[i]);
                r[2 * node + 1] += w * P.row(1).dot(grads[i]);
            }
        }
    }

    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd d(space.num_displacement_dofs());
        for (int i = 0; i < d.size(); ++i) d[i] = unif(rng);
        double h = 1e-6;
        DisplacementPressureField fp = f, fm = f;
        fp.u += h * d;
        fm.u -= h * d;
        double fd = (total_energy(fp) - total_energy(fm)) / (2.0 * h);
        CHECK(std::abs(fd - r.dot(d)) <= 1e-8 * std::max(1.0, std::abs(r.dot(d))));
    }
}

TEST_CASE("newton at zero load returns the zero field immediately") {
    Mesh mesh = build_cook_mesh(1);
    TaylorHoodSpace space(mesh);
    MaterialParams params{1.0};
    NewtonLog log;
    DisplacementPressureField f = solve_newton(space, params, 0.0, {}, &log);
    CHECK(f.u.norm() == 0.0);
    CHECK(f.p.norm() == 0.0);
    for (const auto& s : log.steps) CHECK(s.iterations == 0);
}

TEST_CASE("cook solve at gamma = 0.2 bends upward in the nonlinear regime") {
    Mesh mesh = build_cook_mesh(2);
    TaylorHoodSpace space(mesh);
    MaterialParams params{1.0};

    DisplacementPressureField f1 = solve_newton(space, params, 0.1);
    DisplacementPressureField f2 = solve_newton(space, params, 0.2);

    // The loaded corner moves up.
    int tip = -1;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if ((mesh.vertices[v] - Vec2(0.48, 0.6)).norm() < 1e-12) tip = v;
    }
    REQUIRE(tip >= 0);
    CHECK(f2.u[2 * tip + 1] > 0.01);

    // Residuals converged and the deformation is admissible.
    Eigen::VectorXd r2 = assemble_residual(f2, params, cook_surface_load(0.2),
                                           zero_volume_load(), true);
    CHECK(r2.lpNorm<Eigen::Infinity>() <= 1e-10 * 1.2);
    CHECK(min_det_f(f2) > 0.0);

    // Geometric nonlinearity: doubling the load does not double the response.
    double ratio = f2.u[2 * tip + 1] / f1.u[2 * tip + 1];
    CHECK(std::abs(ratio - 2.0) > 0.02);

    // Incompressibility: the volumetric residual vanishes weakly; the total
    // deformed area matches the reference area closely.
    const TriangleRule& rule = triangle_rule(kMaterialQuadOrder);
    double vol_defect = 0.0;
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        double jac = 2.0 * mesh.area(tri);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            auto [b0, b1, b2] = rule.points[q];
            Mat2 F = f2.deformation_gradient(tri, b0, b1, b2);
            vol_defect += rule.weights[q] * jac * (F.determinant() - 1.0);
        }
    }
    CHECK(std::abs(vol_defect) <= 1e-8);
}

TEST_CASE("halving the load steps does not change the converged solution") {
    Mesh mesh = build_cook_mesh(1);
    TaylorHoodSpace space(mesh);
    MaterialParams params{1.0};

    NewtonOptions four;
    four.load_steps = 4;
    NewtonOptions eight;
    eight.load_steps = 8;
    DisplacementPressureField a = solve_newton(space, params, 0.2, four);
    DisplacementPressureField b = solve_newton(space, params, 0.2, eight);
    CHECK((a.u - b.u).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK((a.p - b.p).lpNorm<Eigen::Infinity>() <= 1e-9);
}
