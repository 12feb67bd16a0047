// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/types.hpp"

#include <vector>

namespace stresseq {

/// Quadrature rule on the reference triangle {(x,y): x,y >= 0, x+y <= 1},
/// stored in barycentric coordinates. Weights sum to the reference area 1/2.
struct TriangleRule {
    struct Point {
        double b0, b1, b2;
    };
    std::vector<Point> points;
    std::vector<double> weights;
    int order = 0; // exactness degree
};

/// Smallest available rule exact for polynomials of total degree <= order.
const TriangleRule& triangle_rule(int order);

/// Gauss-Legendre rule on [0,1]; exact for degree <= 2n-1.
struct SegmentRule {
    std::vector<double> points;
    std::vector<double> weights;
};
const SegmentRule& segment_rule(int npoints);

// Quadrature degrees used across the pipeline. Integrals involving the
// nonlinear material stress use the same (over-integrating) rule everywhere,
// so that projection constraints and compatibility audits reproduce the
// discrete Galerkin identity exactly rather than up to quadrature error.
inline constexpr int kMaterialQuadOrder = 8;
inline constexpr int kPolynomialQuadOrder = 4;
inline constexpr int kEdgeQuadPoints = 5; // exact to degree 9

} // namespace stresseq
