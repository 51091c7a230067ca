#include "femcert/constants.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "femcert/csvfmt.hpp"
#include "femcert/errors.hpp"
#include "femcert/fem.hpp"
#include "femcert/mesh.hpp"
#include "femcert/parallel.hpp"
#include "femcert/quadrature.hpp"

namespace femcert {

std::string to_string(ConstantId j) {
    switch (j) {
        case ConstantId::c0: return "0";
        case ConstantId::c1: return "1";
        case ConstantId::c2: return "2";
        case ConstantId::c3: return "3";
        case ConstantId::c12: return "12";
        case ConstantId::c123: return "123";
        case ConstantId::c4: return "4";
        case ConstantId::c5: return "5";
        case ConstantId::c6: return "6";
    }
    return "?";
}

std::optional<ConstantId> parse_constant_id(const std::string& token) {
    if (token == "0") return ConstantId::c0;
    if (token == "1") return ConstantId::c1;
    if (token == "2") return ConstantId::c2;
    if (token == "3") return ConstantId::c3;
    if (token == "12") return ConstantId::c12;
    if (token == "123") return ConstantId::c123;
    if (token == "4") return ConstantId::c4;
    if (token == "5") return ConstantId::c5;
    if (token == "6") return ConstantId::c6;
    return std::nullopt;
}

std::string to_string(EstimateMethod m) {
    switch (m) {
        case EstimateMethod::exact_root: return "exact-root";
        case EstimateMethod::closed_form: return "closed-form";
        case EstimateMethod::eigen_lower: return "eigen-lower";
        case EstimateMethod::chain_upper: return "chain-upper";
        case EstimateMethod::external: return "external";
    }
    return "?";
}

double c0_exact() { return 1.0 / M_PI; }

namespace {

// Smallest positive root of t + tan(t) = 0, located in (pi/2, pi).
double tan_root() {
    auto g = [](double t) { return t + std::tan(t); };
    double lo = M_PI / 2.0 + 1e-9, hi = M_PI - 1e-9;
    while (hi - lo > 1e-14) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double t = 0.5 * (lo + hi);
    for (int k = 0; k < 3; ++k) {
        double c = std::cos(t);
        t -= (t + std::tan(t)) / (1.0 + 1.0 / (c * c));
    }
    return t;
}

} // namespace

double solve_c1_transcendental() { return 1.0 / tan_root(); }

double solve_c12_transcendental() { return 1.0 / (2.0 * tan_root()); }

double c6_closed_form(double alpha, double theta, double c1, double c2) {
    TriangleShape s{alpha, theta, 1.0};
    if (!s.in_range()) throw std::invalid_argument("c6_closed_form: shape out of range");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("c6_closed_form: c1, c2 > 0");
    double ct = std::cos(theta), st = std::sin(theta);
    double inner = c1 * c1 + c2 * c2 + 2.0 * c1 * c2 * std::cos(2.0 * theta);
    inner = std::max(inner, 0.0);
    double num = c1 * c1 + c2 * c2 + 2.0 * c1 * c2 * ct * ct + (c1 + c2) * std::sqrt(inner);
    return std::sqrt(num) / (std::sqrt(2.0) * st);
}

double shape_factor(double theta) { return std::sqrt(1.0 + std::abs(std::cos(theta))); }

double c0_upper(double alpha, double theta) {
    (void)alpha; // C_0(alpha, pi/2) is nondecreasing in alpha, value 1/pi at alpha = 1
    return shape_factor(theta) * c0_exact();
}

double c1_upper(double alpha, double theta) {
    (void)alpha;
    return shape_factor(theta) * solve_c1_transcendental();
}

double c12_upper(double alpha, double theta) {
    (void)alpha;
    return shape_factor(theta) * solve_c12_transcendental();
}

double c123_upper(double alpha, double theta) {
    // V^{1,2,3} is a subspace of V^{1,2}.
    return c12_upper(alpha, theta);
}

namespace {

// Collects the constraint rows for the eigenvalue lower bound: the exact
// integral of a P1 function over the domain (J = 0) or along the requested
// boundary sides of the reference triangle (trapezoid identity, exact).
Eigen::MatrixXd constraint_rows(const Mesh& mesh, ConstantId j, double alpha, double theta,
                                double h) {
    const int m = mesh.n_vertices();
    std::vector<int> sides;
    switch (j) {
        case ConstantId::c0: {
            Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, m);
            for (int t = 0; t < mesh.n_triangles(); ++t) {
                double w = mesh.area(t) / 3.0;
                for (int v : mesh.triangle(t)) c(0, v) += w;
            }
            return c;
        }
        case ConstantId::c1: sides = {0}; break;
        case ConstantId::c2: sides = {1}; break;
        case ConstantId::c3: sides = {2}; break;
        case ConstantId::c12: sides = {0, 1}; break;
        case ConstantId::c123: sides = {0, 1, 2}; break;
        default:
            throw std::invalid_argument("eigen_constant_lower: J must be a Rayleigh-quotient id");
    }

    // Side segments of T(alpha,theta,h): e1 = OA, e2 = OB, e3 = AB.
    const Point2 O{0.0, 0.0};
    const Point2 A{h, 0.0};
    const Point2 B{alpha * h * std::cos(theta), alpha * h * std::sin(theta)};
    const std::array<std::pair<Point2, Point2>, 3> seg{{{O, A}, {O, B}, {A, B}}};

    auto on_segment = [h](Point2 p, Point2 a, Point2 b) {
        Vec2 d = b - a;
        double dist = std::abs(cross(d, p - a)) / norm(d);
        return dist <= 1e-9 * h;
    };

    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<int>(sides.size()), m);
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& ed = mesh.edge(e);
        if (!ed.boundary) continue;
        Point2 pa = mesh.vertex(ed.v[0]), pb = mesh.vertex(ed.v[1]);
        int hits = 0;
        for (size_t r = 0; r < sides.size(); ++r) {
            const auto& [sa, sb] = seg[sides[r]];
            if (on_segment(pa, sa, sb) && on_segment(pb, sa, sb)) {
                c(static_cast<int>(r), ed.v[0]) += 0.5 * ed.length;
                c(static_cast<int>(r), ed.v[1]) += 0.5 * ed.length;
                ++hits;
            }
        }
        if (hits > 1) throw NumericalError("eigen_constant_lower: ambiguous side assignment");
    }
    return c;
}

// Orthonormal basis of the null space of the constraint rows.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& c) {
    const int m = static_cast<int>(c.cols());
    const int k = static_cast<int>(c.rows());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c.transpose());
    Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (int i = 0; i < k; ++i) {
        if (std::abs(r(i, i)) < 1e-12 * (1.0 + std::abs(r(0, 0)))) {
            throw NumericalError("constraint rows are rank deficient");
        }
    }
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
    return q.rightCols(m - k);
}

} // namespace

double eigen_constant_lower(ConstantId j, double alpha, double theta, int n, double h) {
    if (n < 2) throw std::invalid_argument("eigen_constant_lower: n must be >= 2");
    Mesh mesh = generate_reference_triangle_mesh(alpha, theta, n, h);

    Eigen::SparseMatrix<double> a = assemble_conforming(mesh).stiffness;
    Eigen::SparseMatrix<double> m = assemble_conforming_mass(mesh);
    Eigen::MatrixXd c = constraint_rows(mesh, j, alpha, theta, h);
    Eigen::MatrixXd z = null_space(c);

    Eigen::MatrixXd az = a * z;
    Eigen::MatrixXd mz = m * z;
    Eigen::MatrixXd sa = z.transpose() * az;
    Eigen::MatrixXd sm = z.transpose() * mz;
    sa = 0.5 * (sa + sa.transpose()).eval();
    sm = 0.5 * (sm + sm.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges;
    ges.compute(sa, sm, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success) {
        throw NumericalError("eigen_constant_lower: generalized eigensolver failed");
    }
    double lambda_min = ges.eigenvalues()(0);
    if (!(lambda_min > 0.0)) {
        throw NumericalError("eigen_constant_lower: nonpositive smallest eigenvalue");
    }
    return 1.0 / std::sqrt(lambda_min);
}

namespace {

struct PolyBasis {
    // monomials ((x - xc)/s)^a ((y - yc)/s)^b with a + b <= d
    std::vector<std::pair<int, int>> powers;
    Point2 xc;
    double s;

    double value(Point2 p, int k) const {
        auto [a, b] = powers[k];
        double u = (p.x1 - xc.x1) / s, v = (p.x2 - xc.x2) / s;
        return std::pow(u, a) * std::pow(v, b);
    }
    Vec2 grad(Point2 p, int k) const {
        auto [a, b] = powers[k];
        double u = (p.x1 - xc.x1) / s, v = (p.x2 - xc.x2) / s;
        double gx = a == 0 ? 0.0 : a * std::pow(u, a - 1) * std::pow(v, b) / s;
        double gy = b == 0 ? 0.0 : b * std::pow(u, a) * std::pow(v, b - 1) / s;
        return {gx, gy};
    }
    // (dxx, dxy, dyy)
    std::array<double, 3> hess(Point2 p, int k) const {
        auto [a, b] = powers[k];
        double u = (p.x1 - xc.x1) / s, v = (p.x2 - xc.x2) / s;
        double s2 = s * s;
        double dxx = a < 2 ? 0.0 : a * (a - 1) * std::pow(u, a - 2) * std::pow(v, b) / s2;
        double dyy = b < 2 ? 0.0 : b * (b - 1) * std::pow(u, a) * std::pow(v, b - 2) / s2;
        double dxy =
            (a < 1 || b < 1) ? 0.0 : a * b * std::pow(u, a - 1) * std::pow(v, b - 1) / s2;
        return {dxx, dxy, dyy};
    }
};

} // namespace

ConstantEstimate c45_bracket(ConstantId j, double alpha, double theta, int poly_degree,
                             double h) {
    if (j != ConstantId::c4 && j != ConstantId::c5) {
        throw std::invalid_argument("c45_bracket: J must be 4 or 5");
    }
    if (poly_degree < 2) throw std::invalid_argument("c45_bracket: poly_degree must be >= 2");
    TriangleShape shape{alpha, theta, h};
    if (!shape.in_range()) throw std::invalid_argument("c45_bracket: shape out of range");

    const Point2 O{0.0, 0.0};
    const Point2 A{h, 0.0};
    const Point2 B{alpha * h * std::cos(theta), alpha * h * std::sin(theta)};
    const std::array<Point2, 3> tri{O, A, B};

    PolyBasis basis;
    basis.xc = triangle_centroid(tri);
    basis.s = std::max({norm(A - O), norm(B - O), norm(B - A)});
    for (int total = 0; total <= poly_degree; ++total) {
        for (int a = total; a >= 0; --a) basis.powers.emplace_back(a, total - a);
    }
    const int m = static_cast<int>(basis.powers.size());

    // Gram matrices, exact for polynomials of this degree.
    auto rule = tri_rule_duffy(tri, poly_degree + 2);
    Eigen::MatrixXd g0 = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd g1 = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd g2 = Eigen::MatrixXd::Zero(m, m);
    std::vector<double> vals(m);
    std::vector<Vec2> grads(m);
    std::vector<std::array<double, 3>> hess(m);
    for (const auto& q : rule) {
        for (int k = 0; k < m; ++k) {
            vals[k] = basis.value(q.x, k);
            grads[k] = basis.grad(q.x, k);
            hess[k] = basis.hess(q.x, k);
        }
        for (int r = 0; r < m; ++r) {
            for (int ccol = r; ccol < m; ++ccol) {
                g0(r, ccol) += q.w * vals[r] * vals[ccol];
                g1(r, ccol) += q.w * dot(grads[r], grads[ccol]);
                g2(r, ccol) += q.w * (hess[r][0] * hess[ccol][0] + 2.0 * hess[r][1] * hess[ccol][1] +
                                      hess[r][2] * hess[ccol][2]);
            }
        }
    }
    for (auto* g : {&g0, &g1, &g2}) {
        *g = g->selfadjointView<Eigen::Upper>();
    }

    // Edge-integral constraints, exact Gauss quadrature along each side.
    const int ngl = poly_degree / 2 + 2;
    GaussLegendre gl = gauss_legendre(ngl);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, m);
    const std::array<std::pair<Point2, Point2>, 3> seg{{{O, A}, {O, B}, {A, B}}};
    for (int r = 0; r < 3; ++r) {
        const auto& [pa, pb] = seg[r];
        double len = norm(pb - pa);
        for (int i = 0; i < ngl; ++i) {
            Point2 x = pa + gl.t[i] * (pb - pa);
            for (int k = 0; k < m; ++k) c(r, k) += len * gl.w[i] * basis.value(x, k);
        }
    }

    Eigen::MatrixXd z = null_space(c);
    Eigen::MatrixXd num = z.transpose() * (j == ConstantId::c4 ? g1 : g0) * z;
    Eigen::MatrixXd den = z.transpose() * g2 * z;
    num = 0.5 * (num + num.transpose()).eval();
    den = 0.5 * (den + den.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges;
    ges.compute(num, den, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success) {
        throw NumericalError(
            "c45_bracket: eigensolver failed (Gram matrix near-singular); reduce poly_degree");
    }
    double lambda_max = ges.eigenvalues()(ges.eigenvalues().size() - 1);
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
        throw NumericalError("c45_bracket: invalid Rayleigh maximum; reduce poly_degree");
    }

    ConstantEstimate est;
    est.id = j;
    est.alpha = alpha;
    est.theta = theta;
    est.poly_degree = poly_degree;
    est.lower = std::sqrt(lambda_max);
    est.lower_method = EstimateMethod::eigen_lower;
    est.upper_method = EstimateMethod::chain_upper;
    est.upper = j == ConstantId::c4 ? h * c0_upper(alpha, theta)
                                    : h * h * c0_upper(alpha, theta) * c123_upper(alpha, theta);
    return est;
}

ConstantEstimate estimate_constant(ConstantId j, double alpha, double theta, int n,
                                   int poly_degree) {
    ConstantEstimate est;
    est.id = j;
    est.alpha = alpha;
    est.theta = theta;
    est.n = n;
    switch (j) {
        case ConstantId::c4:
        case ConstantId::c5: {
            est = c45_bracket(j, alpha, theta, poly_degree);
            break;
        }
        case ConstantId::c6: {
            // The closed form is monotone in c1, c2; evaluating it at lower
            // and upper estimates of C_1, C_2 brackets the formula value.
            double lo1 = eigen_constant_lower(ConstantId::c1, alpha, theta, n);
            double lo2 = eigen_constant_lower(ConstantId::c2, alpha, theta, n);
            est.lower = c6_closed_form(alpha, theta, lo1, lo2);
            est.upper = c6_closed_form(alpha, theta, c1_upper(alpha, theta), c1_upper(alpha, theta));
            est.lower_method = EstimateMethod::closed_form;
            est.upper_method = EstimateMethod::closed_form;
            break;
        }
        default: {
            est.lower = eigen_constant_lower(j, alpha, theta, n);
            est.lower_method = EstimateMethod::eigen_lower;
            switch (j) {
                case ConstantId::c0: est.upper = c0_upper(alpha, theta); break;
                case ConstantId::c1:
                case ConstantId::c2: est.upper = c1_upper(alpha, theta); break;
                case ConstantId::c12: est.upper = c12_upper(alpha, theta); break;
                case ConstantId::c123: est.upper = c123_upper(alpha, theta); break;
                default:
                    // No derivable bound for C_3 here.
                    est.upper = std::numeric_limits<double>::infinity();
                    est.upper_method = EstimateMethod::external;
                    break;
            }
            if (j != ConstantId::c3) est.upper_method = EstimateMethod::chain_upper;
            break;
        }
    }
    est.n = n;
    return est;
}

std::vector<AtlasRow> constants_atlas(const std::vector<ConstantId>& js,
                                      const std::vector<double>& alphas, double theta, int n,
                                      int poly_degree, int threads) {
    std::vector<AtlasRow> rows(js.size() * alphas.size());
    parallel_for(static_cast<int>(rows.size()), threads, [&](int i) {
        ConstantId j = js[i / alphas.size()];
        double alpha = alphas[i % alphas.size()];
        AtlasRow& row = rows[i];
        try {
            row.estimate = estimate_constant(j, alpha, theta, n, poly_degree);
        } catch (const std::exception& e) {
            row.estimate.id = j;
            row.estimate.alpha = alpha;
            row.estimate.theta = theta;
            row.estimate.n = n;
            row.estimate.poly_degree = poly_degree;
            row.estimate.lower = std::numeric_limits<double>::quiet_NaN();
            row.estimate.upper = std::numeric_limits<double>::quiet_NaN();
            row.error = e.what();
        }
    });
    return rows;
}

void write_atlas_csv(std::ostream& out, const std::vector<AtlasRow>& rows) {
    out << "J,alpha,theta,lower,upper,method,n,poly_degree\n";
    for (const AtlasRow& r : rows) {
        const ConstantEstimate& e = r.estimate;
        out << to_string(e.id) << ',' << fmt17(e.alpha) << ',' << fmt17(e.theta) << ',';
        if (r.error.empty()) {
            out << fmt17(e.lower) << ',' << fmt17(e.upper) << ',' << to_string(e.lower_method)
                << '+' << to_string(e.upper_method);
        } else {
            out << ",,error";
        }
        out << ',' << e.n << ',' << e.poly_degree << '\n';
    }
}

} // namespace femcert
