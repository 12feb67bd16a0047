// SPDX-License-Identifier: Apache-2.0
#include "stresseq/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace stresseq {

namespace {

// Newton iteration on Legendre polynomials; nodes on [-1,1] mapped to [0,1].
SegmentRule make_gauss_legendre(int n) {
    SegmentRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Recurrence for P_n(x) and P'_n(x).
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

void push(TriangleRule& r, double b0, double b1, double b2, double w) {
    r.points.push_back({b0, b1, b2});
    r.weights.push_back(w);
}

// Symmetric orbit helpers; weights given relative to reference area 1/2.
void push_orbit3(TriangleRule& r, double a, double w) {
    double b = 1.0 - 2.0 * a;
    push(r, b, a, a, w);
    push(r, a, b, a, w);
    push(r, a, a, b, w);
}

TriangleRule make_centroid_rule() {
    TriangleRule r;
    r.order = 1;
    push(r, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5);
    return r;
}

TriangleRule make_order2_rule() {
    TriangleRule r;
    r.order = 2;
    push_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
    return r;
}

TriangleRule make_order5_rule() {
    // 7-point rule: centroid + two 3-orbits.
    TriangleRule r;
    r.order = 5;
    push(r, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5 * 9.0 / 40.0);
    const double s15 = std::sqrt(15.0);
    push_orbit3(r, (6.0 - s15) / 21.0, 0.5 * (155.0 - s15) / 1200.0);
    push_orbit3(r, (6.0 + s15) / 21.0, 0.5 * (155.0 + s15) / 1200.0);
    return r;
}

// Collapsed (Duffy) product rule: exact for any requested degree, at the
// price of more points. x = u, y = v(1-u); the Jacobian (1-u) raises the
// u-degree of the integrand by one.
TriangleRule make_collapsed_rule(int order) {
    int n = (order + 3) / 2; // 2n-1 >= order+1
    const SegmentRule& gl = segment_rule(n);
    TriangleRule r;
    r.order = order;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double u = gl.points[i];
            double v = gl.points[j];
            double x = u;
            double y = v * (1.0 - u);
            double w = gl.weights[i] * gl.weights[j] * (1.0 - u);
            push(r, 1.0 - x - y, x, y, w);
        }
    }
    return r;
}

} // namespace

const SegmentRule& segment_rule(int npoints) {
    static std::map<int, SegmentRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(npoints);
    if (it == cache.end()) it = cache.emplace(npoints, make_gauss_legendre(npoints)).first;
    return it->second;
}

const TriangleRule& triangle_rule(int order) {
    static std::map<int, TriangleRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    TriangleRule r;
    if (order <= 1) {
        r = make_centroid_rule();
    } else if (order == 2) {
        r = make_order2_rule();
    } else if (order <= 5) {
        r = make_order5_rule();
        r.order = order;
    } else {
        r = make_collapsed_rule(order);
    }
    return cache.emplace(order, std::move(r)).first->second;
}

} // namespace stresseq
