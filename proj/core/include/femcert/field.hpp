#pragma once

#include <functional>
#include <optional>

#include "femcert/geometry.hpp"

namespace femcert {

class Mesh;

// A scalar function of position, optionally with an analytic gradient and
// closed-form global norms. The norms, when present, refer to the domain the
// field is meant to be used on (for the builtin loads: the unit square).
struct ScalarField {
    std::function<double(Point2)> value;
    std::function<Vec2(Point2)> gradient; // may be empty
    std::optional<double> l2_norm;        // ||f||
    std::optional<double> h1_seminorm;    // |f|_1 = ||grad f||

    bool has_gradient() const { return static_cast<bool>(gradient); }
};

// f(x) = sin(pi x1) sin(pi x2) on the unit square; ||f|| = 1/2, |f|_1 = pi/sqrt(2).
ScalarField sinsin_load();

// Exact solution of -lap u = sinsin on the unit square with zero boundary
// values: u = sinsin / (2 pi^2), with gradient and norms.
ScalarField sinsin_exact();

ScalarField constant_load(double c);

// f = c[0] + c[1] x1 + c[2] x2 + c[3] x1^2 + c[4] x1 x2 + c[5] x2^2.
ScalarField poly_load(const std::array<double, 6>& c);

// Fills in l2_norm / h1_seminorm by element-wise quadrature over the mesh
// (exact for polynomial data up to degree 2). No-op for entries already set.
void attach_norms_from_mesh(ScalarField& f, const Mesh& mesh);

} // namespace femcert
