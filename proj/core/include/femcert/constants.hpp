#pragma once

#include <optional>
#include <string>
#include <vector>

#include "femcert/geometry.hpp"

namespace femcert {

// Interpolation error constants over the reference triangle T(alpha,theta):
//   C_J = sup ||v|| / |v|_1 over V^J     (J = 0, 1, 2, 3, {1,2}, {1,2,3})
//   C_4 = sup |v|_1 / |v|_2,  C_5 = sup ||v|| / |v|_2   over V^4
//   C_6 = closed-form bound for the lowest-order H(div) interpolation error
// where V^0 constrains the domain mean and the edge-type spaces constrain
// edge integrals (e1 = OA, e2 = OB, e3 = AB).
enum class ConstantId { c0, c1, c2, c3, c12, c123, c4, c5, c6 };

std::string to_string(ConstantId j);
std::optional<ConstantId> parse_constant_id(const std::string& token);

enum class EstimateMethod { exact_root, closed_form, eigen_lower, chain_upper, external };

std::string to_string(EstimateMethod m);

struct ConstantEstimate {
    ConstantId id = ConstantId::c0;
    double alpha = 1.0;
    double theta = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    EstimateMethod lower_method = EstimateMethod::eigen_lower;
    EstimateMethod upper_method = EstimateMethod::chain_upper;
    int n = 0;           // mesh subdivision used for eigenvalue lower bounds
    int poly_degree = 0; // polynomial degree used for C_4 / C_5 lower bounds
};

// C_0 = 1/pi (exact).
double c0_exact();

// Largest positive mu with 1/mu + tan(1/mu) = 0; equals C_1 = C_2.
// Bisection on t = 1/mu over (pi/2, pi) to width 1e-14, then Newton polish.
double solve_c1_transcendental();

// Largest positive mu with 1/(2 mu) + tan(1/(2 mu)) = 0; equals C_{1,2}
// = C_1 / 2.
double solve_c12_transcendental();

// Closed form
//   { c1^2 + c2^2 + 2 c1 c2 cos^2(theta)
//     + (c1 + c2) sqrt(c1^2 + c2^2 + 2 c1 c2 cos(2 theta)) }^(1/2) / (sqrt(2) sin theta)
// monotone increasing in c1 and c2, divergent as theta -> pi.
double c6_closed_form(double alpha, double theta, double c1, double c2);

// Guaranteed lower bound of C_J(alpha,theta) * h for the Rayleigh-quotient
// constants (J in {0,1,2,3,{1,2},{1,2,3}}): conforming P1 discretization of
// the constrained eigenproblem on the uniformly subdivided reference
// triangle; the discrete constrained space is a subspace of V^J, so the
// discrete supremum never exceeds the true constant.
double eigen_constant_lower(ConstantId j, double alpha, double theta, int n, double h = 1.0);

// Bracket for C_4 or C_5: lower bound from the Rayleigh quotient maximized
// over the polynomial subspace of V^4 with edge-integral constraints imposed
// exactly; upper bound from the chain C_4 <= C_0, C_5 <= C_0 * C_{1,2,3}.
ConstantEstimate c45_bracket(ConstantId j, double alpha, double theta, int poly_degree,
                             double h = 1.0);

// Shape factor sqrt(1 + |cos theta|): the largest singular value of the
// affine map taking T(alpha, pi/2) to T(alpha, theta). Combined with the
// monotonicity of C_J(alpha, pi/2) in alpha this turns the known values at
// (1, pi/2) into upper bounds at any admissible shape.
double shape_factor(double theta);
double c0_upper(double alpha, double theta);
double c1_upper(double alpha, double theta); // also C_2
double c12_upper(double alpha, double theta);
double c123_upper(double alpha, double theta);

// One bracket for any J at the given shape (dispatches to the routines
// above; J = 3 has no derivable upper bound and reports +infinity).
ConstantEstimate estimate_constant(ConstantId j, double alpha, double theta, int n,
                                   int poly_degree);

struct AtlasRow {
    ConstantEstimate estimate;
    std::string error; // non-empty when the point failed
};

// One row per (J, alpha); failed points carry the error message and do not
// abort the sweep. Sweeps run in parallel capped by `threads` (0 = default).
std::vector<AtlasRow> constants_atlas(const std::vector<ConstantId>& js,
                                      const std::vector<double>& alphas, double theta, int n,
                                      int poly_degree, int threads = 0);

// CSV schema: J,alpha,theta,lower,upper,method,n,poly_degree
void write_atlas_csv(std::ostream& out, const std::vector<AtlasRow>& rows);

} // namespace femcert
