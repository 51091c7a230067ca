#pragma once

#include <array>
#include <cmath>

namespace femcert {

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    Vec2 operator+(Vec2 o) const { return {x1 + o.x1, x2 + o.x2}; }
    Vec2 operator-(Vec2 o) const { return {x1 - o.x1, x2 - o.x2}; }
    Vec2 operator*(double s) const { return {x1 * s, x2 * s}; }
    Vec2 operator/(double s) const { return {x1 / s, x2 / s}; }
    Vec2& operator+=(Vec2 o) { x1 += o.x1; x2 += o.x2; return *this; }
};

using Point2 = Vec2;

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double cross(Vec2 a, Vec2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }
inline double squared_norm(Vec2 a) { return a.x1 * a.x1 + a.x2 * a.x2; }

// Counter-clockwise rotation by pi/2.
inline Vec2 rot90(Vec2 v) { return {-v.x2, v.x1}; }

inline double signed_area(Point2 a, Point2 b, Point2 c) {
    return 0.5 * cross(b - a, c - a);
}

inline Point2 triangle_centroid(const std::array<Point2, 3>& v) {
    return {(v[0].x1 + v[1].x1 + v[2].x1) / 3.0, (v[0].x2 + v[1].x2 + v[2].x2) / 3.0};
}

// Shape parameters of a triangle congruent to the reference triangle with
// vertices O(0,0), A(h,0), B(alpha*h*cos(theta), alpha*h*sin(theta)).
// h is the *medium* edge length, alpha*h the shortest, and theta the angle
// between them; the admissible range is 0 < alpha <= 1 and
// acos(alpha/2) <= theta < pi, which makes the remaining edge the longest.
struct TriangleShape {
    double alpha = 1.0;
    double theta = 0.0;
    double h = 0.0;

    bool in_range(double tol = 1e-12) const {
        return h > 0.0 && alpha > 0.0 && alpha <= 1.0 + tol &&
               theta >= std::acos(alpha > 1.0 ? 0.5 : alpha / 2.0) - tol &&
               theta < 3.14159265358979323846;
    }
};

// Relative area threshold below which a triangle is rejected as degenerate.
inline constexpr double kDegenerateAreaFactor = 1e-14;

// Classifies a vertex triple into (alpha, theta, h). Throws MeshError for
// degenerate input (|area| <= 1e-14 * longest_edge^2). Ties between equal
// edge lengths are broken by the lexicographic order of the sorted local
// vertex-index pairs, so the result is deterministic. Only lengths and one
// included angle are used, hence the result is invariant under all rigid
// motions including reflections.
TriangleShape classify_shape(const std::array<Point2, 3>& tri);

} // namespace femcert
