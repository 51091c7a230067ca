#include "femcert/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace femcert {

namespace {

std::vector<QuadPoint> from_barycentric(const std::array<Point2, 3>& tri,
                                        const std::vector<std::array<double, 4>>& bw) {
    const double area = std::abs(signed_area(tri[0], tri[1], tri[2]));
    std::vector<QuadPoint> rule;
    rule.reserve(bw.size());
    for (const auto& p : bw) {
        Point2 x = p[0] * tri[0] + p[1] * tri[1] + p[2] * tri[2];
        rule.push_back({x, p[3] * area});
    }
    return rule;
}

} // namespace

std::vector<QuadPoint> tri_rule_midpoint(const std::array<Point2, 3>& tri) {
    const double w = 1.0 / 3.0;
    return from_barycentric(tri, {
        {0.5, 0.5, 0.0, w},
        {0.0, 0.5, 0.5, w},
        {0.5, 0.0, 0.5, w},
    });
}

std::vector<QuadPoint> tri_rule_deg5(const std::array<Point2, 3>& tri) {
    // Strang-Fix 7-point rule.
    const double s15 = std::sqrt(15.0);
    const double b1 = (6.0 + s15) / 21.0, w1 = (155.0 + s15) / 1200.0;
    const double b2 = (6.0 - s15) / 21.0, w2 = (155.0 - s15) / 1200.0;
    const double a1 = 1.0 - 2.0 * b1, a2 = 1.0 - 2.0 * b2;
    return from_barycentric(tri, {
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
        {a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
        {a2, b2, b2, w2}, {b2, a2, b2, w2}, {b2, b2, a2, w2},
    });
}

std::vector<QuadPoint> tri_rule_duffy(const std::array<Point2, 3>& tri, int n) {
    if (n < 1) throw std::invalid_argument("tri_rule_duffy: n must be >= 1");
    const GaussLegendre gl = gauss_legendre(n);
    const double area2 = cross(tri[1] - tri[0], tri[2] - tri[0]); // 2 * signed area
    std::vector<QuadPoint> rule;
    rule.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double xi = gl.t[i];
        for (int j = 0; j < n; ++j) {
            const double eta = gl.t[j] * (1.0 - xi);
            Point2 x = tri[0] + xi * (tri[1] - tri[0]) + eta * (tri[2] - tri[0]);
            rule.push_back({x, gl.w[i] * gl.w[j] * (1.0 - xi) * std::abs(area2)});
        }
    }
    return rule;
}

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussLegendre gl;
    gl.t.resize(n);
    gl.w.resize(n);
    // Newton iteration on Legendre P_n over [-1,1], then map to [0,1].
    for (int k = 0; k < n; ++k) {
        double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        gl.t[k] = 0.5 * (1.0 - x); // descending x -> ascending t
        gl.w[k] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

} // namespace femcert
