// SPDX-License-Identifier: Apache-2.0
#include "stresseq/material.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace stresseq;

namespace {

Mat2 random_admissible_F(std::mt19937& rng, double spread = 0.3) {
    std::uniform_real_distribution<double> unif(-spread, spread);
    Mat2 H;
    H << unif(rng), unif(rng), unif(rng), unif(rng);
    Mat2 F = Mat2::Identity() + H;
    if (F.determinant() <= 0.2) return random_admissible_F(rng, spread * 0.5);
    return F;
}

} // namespace

TEST_CASE("stored energy at the reference state") {
    MaterialParams params{1.0, 2.0};
    CHECK(energy_nh(Mat2::Identity(), params) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("reference state is stress free") {
    MaterialParams params{1.0, 2.0};
    CHECK(piola_stress(Mat2::Identity(), params).norm() <= 1e-15);
    MaterialParams incompressible{1.0};
    CHECK(piola_stress_pressure(Mat2::Identity(), 0.0, incompressible).norm() <= 1e-15);
}

TEST_CASE("isochoric diagonal stretch") {
    // F = diag(2, 1/2): det B = 1 so the volumetric term drops out.
    MaterialParams params{1.0, 7.3};
    Mat2 F = Mat2::Zero();
    F(0, 0) = 2.0;
    F(1, 1) = 0.5;
    Mat2 P = piola_stress(F, params);
    Mat2 expected = Mat2::Zero();
    expected(0, 0) = 1.5;
    expected(1, 1) = -1.5;
    CHECK((P - expected).norm() <= 1e-14);
}

TEST_CASE("incompressible pressure form at the identity") {
    MaterialParams params{1.0};
    Mat2 P = piola_stress_pressure(Mat2::Identity(), 3.0, params);
    CHECK((P - 3.0 * Mat2::Identity()).norm() <= 1e-14);
}

TEST_CASE("energy gradient matches the stress by finite differences") {
    MaterialParams params{1.3, 2.7};
    std::mt19937 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        Mat2 F = random_admissible_F(rng);
        Mat2 P = piola_stress(F, params);

        // Central differences with an h-sweep: error should shrink ~h^2.
        double prev_err = std::numeric_limits<double>::infinity();
        for (double h : {1e-3, 1e-4}) {
            Mat2 fd = Mat2::Zero();
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    Mat2 Fp = F, Fm = F;
                    Fp(i, j) += h;
                    Fm(i, j) -= h;
                    fd(i, j) = (energy_nh(Fp * Fp.transpose(), params) -
                                energy_nh(Fm * Fm.transpose(), params)) /
                               (2.0 * h);
                }
            }
            double err = (fd - P).norm() / P.norm();
            CHECK(err <= 1e-5);
            CHECK(err <= prev_err + 1e-12);
            prev_err = err;
        }
    }
}

TEST_CASE("pressure form agrees with the displacement form at p = lambda (det F - 1)") {
    MaterialParams params{0.9, 3.4};
    std::mt19937 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Mat2 F = random_admissible_F(rng);
        double p = params.lambda * (F.determinant() - 1.0);
        Mat2 a = piola_stress(F, params);
        Mat2 b = piola_stress_pressure(F, p, params);
        CHECK((a - b).norm() <= 1e-12 * std::max(1.0, a.norm()));
    }
}

TEST_CASE("small-strain expansion P = mu (H + H^T) + lambda tr(H) I") {
    MaterialParams params{1.7, 2.2};
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Mat2 H;
    H << unif(rng), unif(rng), unif(rng), unif(rng);

    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        Mat2 Heps = eps * H;
        Mat2 P = piola_stress(Mat2::Identity() + Heps, params);
        Mat2 lin = params.mu * (Heps + Heps.transpose()) +
                   params.lambda * Heps.trace() * Mat2::Identity();
        double err = (P - lin).norm();
        // Second-order error: dividing eps by 10 divides the error by ~100.
        CHECK(err <= 10.0 * eps * eps * (params.mu + params.lambda) * H.squaredNorm() + 1e-15);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("analytic tangent matches finite differences of the stress") {
    std::mt19937 rng(41);
    for (MaterialParams params : {MaterialParams{1.0, 5.0}, MaterialParams{1.0}}) {
        Mat2 F = random_admissible_F(rng);
        double p = 0.37;
        KinematicState kin = KinematicState::from_F(F);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int trial = 0; trial < 10; ++trial) {
            Mat2 dH;
            dH << unif(rng), unif(rng), unif(rng), unif(rng);
            double dp = unif(rng);
            Mat2 tangent = piola_stress_tangent(kin, p, dp, dH, params);
            double h = 1e-6;
            Mat2 fd = (piola_stress_pressure(F + h * dH, p + h * dp, params) -
                       piola_stress_pressure(F - h * dH, p - h * dp, params)) /
                      (2.0 * h);
            CHECK((tangent - fd).norm() <= 1e-6 * std::max(1.0, tangent.norm()));
        }
    }
}

TEST_CASE("nonpositive determinant raises NONPOSITIVE_DET") {
    MaterialParams params{1.0, 1.0};
    Mat2 F = Mat2::Identity();
    F(0, 0) = -2.0;
    CHECK_THROWS_WITH_AS(piola_stress(F, params), doctest::Contains("NONPOSITIVE_DET"), Error);
    Mat2 B = Mat2::Identity();
    B(1, 1) = -1.0;
    CHECK_THROWS_WITH_AS(energy_nh(B, params), doctest::Contains("NONPOSITIVE_DET"), Error);
}
