#pragma once

#include <array>
#include <vector>

#include "femcert/geometry.hpp"

namespace femcert {

struct QuadPoint {
    Point2 x;
    double w; // physical weight; weights of a rule sum to the triangle area
};

// 3-point edge-midpoint rule, exact for polynomials of total degree <= 2.
std::vector<QuadPoint> tri_rule_midpoint(const std::array<Point2, 3>& tri);

// 7-point rule, exact for polynomials of total degree <= 5.
std::vector<QuadPoint> tri_rule_deg5(const std::array<Point2, 3>& tri);

// Collapsed (Duffy) Gauss-Legendre tensor rule with n points per axis;
// exact for polynomials of total degree <= 2n-2.
std::vector<QuadPoint> tri_rule_duffy(const std::array<Point2, 3>& tri, int n);

template <class F>
double integrate(const std::vector<QuadPoint>& rule, F&& f) {
    double s = 0.0;
    for (const auto& q : rule) s += q.w * f(q.x);
    return s;
}

// Gauss-Legendre nodes/weights on [0,1]; weights sum to 1.
struct GaussLegendre {
    std::vector<double> t;
    std::vector<double> w;
};
GaussLegendre gauss_legendre(int n);

// Mean value of f along the segment [a,b], n-point Gauss-Legendre.
template <class F>
double segment_mean(Point2 a, Point2 b, F&& f, int n = 5) {
    GaussLegendre gl = gauss_legendre(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += gl.w[i] * f(a + gl.t[i] * (b - a));
    return s;
}

} // namespace femcert
