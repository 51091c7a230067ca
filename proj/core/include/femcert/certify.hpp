#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "femcert/fem.hpp"
#include "femcert/flux.hpp"

namespace femcert {

// Mesh-wide constants entering the bound formulas: per-triangle shape
// constants are taken at their certified upper estimates and maximized over
// the mesh, so every gamma is a certified upper bound for the corresponding
// global interpolation constant.
struct GlobalConstants {
    double h_star = 0.0; // max over triangles of the medium edge length
    double c0h = 0.0;
    double c12h = 0.0;
    double c6h = 0.0;
    double gamma0 = 0.0; // L2 interpolation:     gamma0 = c0h * c12h
    double gamma1 = 0.0; // energy interpolation: gamma1 = c0h
    double gamma2 = 0.0; // flux interpolation:   gamma2 = c6h
    double gamma3 = 0.0; // mean projection:      gamma3 = c0h
    double max_theta = 0.0;
};

GlobalConstants global_constants(const Mesh& mesh);

// A priori bound for the broken energy error:
//   h* { gamma1^2 ||f||^2 + (gamma2 ||f|| + gamma3 ||f||)^2 }^(1/2)
// using |u|_2 <= ||f|| (valid on convex domains); with the H1 seminorm of
// the load available, the last term sharpens to gamma3^2 h* |f|_1.
double apriori_energy_bound(const GlobalConstants& gc, double norm_f,
                            std::optional<double> seminorm_f1 = {});

// A priori L2 bound: positive root of e^2 = h* A1 e + h*^2 A2 with
//   A1 = (gamma1 + gamma2) g + (gamma0 + gamma1 gamma2) h* ||f||
//   A2 = gamma3^2 h* g^2
// where g is (a certified surrogate for) the broken energy error. With
// |f|_1 available the gamma0 h* ||f|| term may be replaced by
// gamma0 gamma3 h*^2 |f|_1; the smaller of the two valid choices is used.
double apriori_l2_bound(const GlobalConstants& gc, double norm_grad_eh, double norm_f,
                        std::optional<double> seminorm_f1 = {});

struct HypercircleBound {
    double bound_flux = 0.0;    // >= ||grad u - p||
    double bound_mid = 0.0;     // >= ||grad u - (grad v + p)/2||
    double flux_distance = 0.0; // ||grad v - p||, computed exactly
    double oscillation = 0.0;   // gamma3 h* ||f - Q_h f|| (or the sharper H1 form)
};

// Fully computable a posteriori bound: v must be an H1_0-conforming field on
// the same mesh and p a conforming flux with div p = -Q_h f built from the
// same projected load.
HypercircleBound aposteriori_hypercircle(const Mesh& mesh, const RtFlux& p,
                                         const ConformingSolution& v, const GlobalConstants& gc,
                                         const ScalarField& f);

// Cheap conforming post-processing of a CR solution: each interior vertex
// takes the average of the midpoint values on its incident edges; boundary
// vertices are zero.
ConformingSolution smooth_cr_to_vertices(const Mesh& mesh, const CrSolution& u);

// ||grad v - p|| with both fields piecewise linear; midpoint rule, exact.
double grad_distance(const Mesh& mesh, const ConformingSolution& v, const RtFlux& p);
// ||f - Q_h f|| by the degree-5 rule.
double data_oscillation(const Mesh& mesh, const ScalarField& f, const PwConstant& fbar);
// True flux errors against an exact gradient.
double flux_error(const Mesh& mesh, const RtFlux& p, const ScalarField& exact);
double mid_error(const Mesh& mesh, const RtFlux& p, const ConformingSolution& v,
                 const ScalarField& exact);

struct BoundReport {
    int N = 0; // Friedrichs-Keller subdivision, 0 for external meshes
    double h_star = 0.0;
    std::optional<double> true_energy_error;
    std::optional<double> true_l2_error;
    std::optional<double> true_flux_error;
    std::optional<double> true_mid_error;
    std::optional<double> apriori_energy;
    std::optional<double> apriori_l2;
    double apost_flux = 0.0;
    double apost_mid = 0.0;
    std::optional<double> eff_energy; // apriori_energy / true_energy_error
    std::optional<double> eff_apost;  // apost_flux / true_flux_error
    std::string grad_surrogate = "apriori_energy"; // input used for the L2 bound
};

struct CertifyOptions {
    bool convex = true; // enables |u|_2 <= ||f||; required for the a priori bounds
    SolveOptions solve;
    int threads = 0; // parallelism across study points (0 = default cap)
};

struct RunResult {
    BoundReport report;
    GlobalConstants gc;
    PwConstant fbar;
    CrSolution u_h;    // unmodified scheme
    CrSolution u_star; // projected load
    RtFlux p;
    ConformingSolution v;
};

// Single certified run on one mesh: both CR solves, flux post-processing,
// conforming field, all bounds, and true errors when `exact` is supplied.
RunResult certified_solve(const Mesh& mesh, const ScalarField& f, const ScalarField* exact,
                          const CertifyOptions& opts = {});

// Friedrichs-Keller refinement study; one report per N.
std::vector<BoundReport> convergence_study(const ScalarField& f, const ScalarField& exact,
                                           const std::vector<int>& Ns,
                                           const CertifyOptions& opts = {});

// Least-squares slope of log(y) against log(x).
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

// CSV schema:
// N,h,energy_err,l2_err,apriori_energy,apriori_l2,apost_flux,apost_mid,eff_energy,eff_apost
// A footer comment with fitted slopes is appended when requested.
void write_report_csv(std::ostream& out, const std::vector<BoundReport>& reports,
                      bool footer_slopes = true);

} // namespace femcert
