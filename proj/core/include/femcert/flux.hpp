#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "femcert/fem.hpp"

namespace femcert {

// Per-triangle coefficients of the quadratic bubble enrichment; for a
// piecewise-constant load the coefficient is -fbar_K / 2.
struct BubbleCoefficients {
    std::vector<double> alpha_k;
};

// Lowest-order Raviart-Thomas field: p(x) = a_K + c_K (x - x_G) on triangle K.
// div p = 2 c_K, and the normal component is constant along every edge.
struct RtFlux {
    const Mesh* mesh = nullptr;
    std::vector<Vec2> a;
    std::vector<double> c;
};

struct UBar {
    std::vector<double> value;
};

// Quadratic bubble on a triangle: |x - x_G|^2 / 2 - (1/12) sum_i |x_i - x_G|^2;
// its mean along each edge vanishes.
double bubble_value(const std::array<Point2, 3>& tri, Point2 x);

// CR solve with the load replaced by its piecewise-constant projection
// (integrated exactly against the CR basis).
CrSolution solve_modified_cr(const Mesh& mesh, const PwConstant& fbar,
                             const SolveOptions& opts = {});
CrSolution solve_modified_cr(const Mesh& mesh, const ScalarField& f, const SolveOptions& opts = {});

BubbleCoefficients bubble_coefficients(const PwConstant& fbar);
BubbleCoefficients bubble_coefficients(const Mesh& mesh, const ScalarField& f);

// Post-processed flux p = grad u_star - (fbar/2)(x - x_G). Verifies H(div)
// conformity: the largest interior normal jump must not exceed
// 1e-10 * max |p|, otherwise the inputs are inconsistent (for example a
// u_star computed from the unmodified scheme) and NumericalError is thrown.
RtFlux build_rt_flux(const Mesh& mesh, const CrSolution& u_star, const PwConstant& fbar);

// Piecewise-constant companion: ubar_K = u_star(x_G) + (fbar_K/48) sum_i |x_i - x_G|^2,
// the translation-invariant evaluation of the element mean of the enriched solution.
UBar build_ubar(const Mesh& mesh, const CrSolution& u_star, const PwConstant& fbar);

// Residuals of the lowest-order mixed system:
//   r1 = max over RT edge basis fields q of |(p, q) + (ubar, div q)|
//   r2 = max over triangles of |div p + fbar|
std::pair<double, double> mixed_residual(const Mesh& mesh, const RtFlux& p, const UBar& ubar,
                                         const PwConstant& fbar);

Vec2 rt_value(const RtFlux& p, int t, Point2 x);

// Largest interior normal jump of p and max |p| over the mesh.
std::pair<double, double> normal_jump(const Mesh& mesh, const RtFlux& p);

// Direct solve on the CR + bubble space with the projected load, assembled
// purely by quadrature; decouples into the modified CR solution and the
// element-local bubble coefficients.
struct EnrichedSolution {
    CrSolution u_star;
    BubbleCoefficients bubbles;
};
EnrichedSolution solve_enriched(const Mesh& mesh, const PwConstant& fbar,
                                const SolveOptions& opts = {});

// CSV schema: tri_index,ax,ay,c,fbar
void write_flux_csv(std::ostream& out, const RtFlux& p, const PwConstant& fbar);

} // namespace femcert
