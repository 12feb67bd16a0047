// SPDX-License-Identifier: Apache-2.0
#include "stresseq/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace stresseq;

namespace {

// Exact reference-triangle monomial integral: int x^a y^b = a! b! / (a+b+2)!
double exact_monomial(int a, int b) {
    auto fact = [](int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    };
    return fact(a) * fact(b) / fact(a + b + 2);
}

} // namespace

TEST_CASE("triangle rules integrate monomials exactly up to their order") {
    for (int order : {1, 2, 3, 4, 5, 6, 8, 10}) {
        const TriangleRule& rule = triangle_rule(order);
        CHECK(rule.order >= order);
        for (int a = 0; a + 0 <= order; ++a) {
            for (int b = 0; a + b <= order; ++b) {
                double sum = 0.0;
                for (size_t q = 0; q < rule.points.size(); ++q) {
                    double x = rule.points[q].b1;
                    double y = rule.points[q].b2;
                    sum += rule.weights[q] * std::pow(x, a) * std::pow(y, b);
                }
                double exact = exact_monomial(a, b);
                CHECK(std::abs(sum - exact) <= 1e-14 * std::max(1.0, std::abs(exact)));
            }
        }
    }
}

TEST_CASE("triangle rule weights sum to the reference area") {
    for (int order : {1, 2, 4, 5, 8}) {
        const TriangleRule& rule = triangle_rule(order);
        double sum = 0.0;
        for (double w : rule.weights) sum += w;
        CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("gauss-legendre rules on [0,1]") {
    for (int n : {1, 2, 3, 4, 5, 8}) {
        const SegmentRule& rule = segment_rule(n);
        REQUIRE(rule.points.size() == static_cast<size_t>(n));
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            double sum = 0.0;
            for (size_t q = 0; q < rule.points.size(); ++q) {
                sum += rule.weights[q] * std::pow(rule.points[q], deg);
            }
            CHECK(sum == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
        }
    }
}
