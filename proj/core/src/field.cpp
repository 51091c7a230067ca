#include "femcert/field.hpp"

#include <cmath>

#include "femcert/mesh.hpp"
#include "femcert/quadrature.hpp"

namespace femcert {

ScalarField sinsin_load() {
    ScalarField f;
    f.value = [](Point2 p) { return std::sin(M_PI * p.x1) * std::sin(M_PI * p.x2); };
    f.gradient = [](Point2 p) -> Vec2 {
        return {M_PI * std::cos(M_PI * p.x1) * std::sin(M_PI * p.x2),
                M_PI * std::sin(M_PI * p.x1) * std::cos(M_PI * p.x2)};
    };
    f.l2_norm = 0.5;
    f.h1_seminorm = M_PI / std::sqrt(2.0);
    return f;
}

ScalarField sinsin_exact() {
    const double s = 1.0 / (2.0 * M_PI * M_PI);
    ScalarField u;
    u.value = [s](Point2 p) { return s * std::sin(M_PI * p.x1) * std::sin(M_PI * p.x2); };
    u.gradient = [s](Point2 p) -> Vec2 {
        return {s * M_PI * std::cos(M_PI * p.x1) * std::sin(M_PI * p.x2),
                s * M_PI * std::sin(M_PI * p.x1) * std::cos(M_PI * p.x2)};
    };
    u.l2_norm = s * 0.5;
    u.h1_seminorm = s * M_PI / std::sqrt(2.0);
    return u;
}

ScalarField constant_load(double c) {
    ScalarField f;
    f.value = [c](Point2) { return c; };
    f.gradient = [](Point2) -> Vec2 { return {0.0, 0.0}; };
    f.h1_seminorm = 0.0;
    return f;
}

ScalarField poly_load(const std::array<double, 6>& c) {
    ScalarField f;
    f.value = [c](Point2 p) {
        return c[0] + c[1] * p.x1 + c[2] * p.x2 + c[3] * p.x1 * p.x1 + c[4] * p.x1 * p.x2 +
               c[5] * p.x2 * p.x2;
    };
    f.gradient = [c](Point2 p) -> Vec2 {
        return {c[1] + 2.0 * c[3] * p.x1 + c[4] * p.x2, c[2] + c[4] * p.x1 + 2.0 * c[5] * p.x2};
    };
    return f;
}

void attach_norms_from_mesh(ScalarField& f, const Mesh& mesh) {
    if (!f.l2_norm) {
        double s = 0.0;
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            auto rule = tri_rule_deg5(mesh.triangle_points(t));
            s += integrate(rule, [&](Point2 x) { double v = f.value(x); return v * v; });
        }
        f.l2_norm = std::sqrt(s);
    }
    if (!f.h1_seminorm && f.has_gradient()) {
        double s = 0.0;
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            auto rule = tri_rule_deg5(mesh.triangle_points(t));
            s += integrate(rule, [&](Point2 x) { return squared_norm(f.gradient(x)); });
        }
        f.h1_seminorm = std::sqrt(s);
    }
}

} // namespace femcert
