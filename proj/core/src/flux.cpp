#include "femcert/flux.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/SparseCholesky>

#include "femcert/csvfmt.hpp"
#include "femcert/quadrature.hpp"

namespace femcert {

double bubble_value(const std::array<Point2, 3>& tri, Point2 x) {
    Point2 g = triangle_centroid(tri);
    double moment = 0.0;
    for (const Point2& v : tri) moment += squared_norm(v - g);
    return 0.5 * squared_norm(x - g) - moment / 12.0;
}

CrSolution solve_modified_cr(const Mesh& mesh, const PwConstant& fbar, const SolveOptions& opts) {
    AssembledSystem sys = assemble_cr(mesh);
    Eigen::VectorXd u = solve_reduced(sys, assemble_cr_load(mesh, fbar), opts);
    return {&mesh, std::vector<double>(u.data(), u.data() + u.size())};
}

CrSolution solve_modified_cr(const Mesh& mesh, const ScalarField& f, const SolveOptions& opts) {
    return solve_modified_cr(mesh, project_mean(mesh, f), opts);
}

BubbleCoefficients bubble_coefficients(const PwConstant& fbar) {
    BubbleCoefficients out;
    out.alpha_k.resize(fbar.value.size());
    for (size_t t = 0; t < fbar.value.size(); ++t) out.alpha_k[t] = -0.5 * fbar.value[t];
    return out;
}

BubbleCoefficients bubble_coefficients(const Mesh& mesh, const ScalarField& f) {
    return bubble_coefficients(project_mean(mesh, f));
}

RtFlux build_rt_flux(const Mesh& mesh, const CrSolution& u_star, const PwConstant& fbar) {
    RtFlux p;
    p.mesh = &mesh;
    p.a.resize(mesh.n_triangles());
    p.c.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        p.a[t] = cr_gradient(u_star, t);
        p.c[t] = -0.5 * fbar.value[t];
    }
    auto [jump, scale] = normal_jump(mesh, p);
    if (jump > 1e-10 * std::max(scale, 1e-300)) {
        throw NumericalError("build_rt_flux: flux is not H(div)-conforming (normal jump " +
                             std::to_string(jump) + "); u_star and fbar are inconsistent");
    }
    return p;
}

UBar build_ubar(const Mesh& mesh, const CrSolution& u_star, const PwConstant& fbar) {
    UBar out;
    out.value.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto tri = mesh.triangle_points(t);
        Point2 g = triangle_centroid(tri);
        double moment = 0.0;
        for (const Point2& v : tri) moment += squared_norm(v - g);
        out.value[t] = cr_value(u_star, t, g) + fbar.value[t] / 48.0 * moment;
    }
    return out;
}

Vec2 rt_value(const RtFlux& p, int t, Point2 x) {
    return p.a[t] + p.c[t] * (x - p.mesh->centroid(t));
}

std::pair<double, double> normal_jump(const Mesh& mesh, const RtFlux& p) {
    double scale = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        for (const Point2& v : mesh.triangle_points(t)) {
            scale = std::max(scale, norm(rt_value(p, t, v)));
        }
    }
    double jump = 0.0;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& ed = mesh.edge(e);
        if (ed.boundary) continue;
        double n0 = dot(rt_value(p, ed.tri[0], ed.midpoint), ed.normal);
        double n1 = dot(rt_value(p, ed.tri[1], ed.midpoint), ed.normal);
        jump = std::max(jump, std::abs(n0 - n1));
    }
    return {jump, scale};
}

std::pair<double, double> mixed_residual(const Mesh& mesh, const RtFlux& p, const UBar& ubar,
                                         const PwConstant& fbar) {
    // RT basis field of edge e restricted to an adjacent triangle K:
    //   q(x) = sigma * |e| / (2|K|) * (x - x_opp),
    // where x_opp is the vertex of K opposite e and sigma aligns the outward
    // normal of K with the stored edge normal. Its normal component is the
    // indicator of e; div q = sigma |e| / |K|.
    double r1 = 0.0;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& ed = mesh.edge(e);
        double acc = 0.0;
        for (int side = 0; side < 2; ++side) {
            int t = ed.tri[side];
            if (t < 0) continue;
            double sigma = side == 0 ? 1.0 : -1.0;
            int local = -1;
            for (int i = 0; i < 3; ++i) {
                if (mesh.triangle_edges(t)[i] == e) local = i;
            }
            Point2 opp = mesh.vertex(mesh.triangle(t)[local]);
            double coef = sigma * ed.length / (2.0 * mesh.area(t));
            auto rule = tri_rule_midpoint(mesh.triangle_points(t));
            acc += integrate(rule, [&](Point2 x) {
                return dot(rt_value(p, t, x), coef * (x - opp));
            });
            acc += ubar.value[t] * sigma * ed.length;
        }
        r1 = std::max(r1, std::abs(acc));
    }
    double r2 = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        r2 = std::max(r2, std::abs(2.0 * p.c[t] + fbar.value[t]));
    }
    return {r1, r2};
}

EnrichedSolution solve_enriched(const Mesh& mesh, const PwConstant& fbar,
                                const SolveOptions& opts) {
    // Unknowns: interior CR edges followed by one bubble per triangle. All
    // matrix entries come from the midpoint rule, which is exact here (the
    // integrands are polynomials of degree <= 2).
    DofMap cr = make_cr_dofmap(mesh);
    const int ncr = cr.n_reduced();
    const int ntri = mesh.n_triangles();
    const int n = ncr + ntri;

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < ntri; ++t) {
        auto pts = mesh.triangle_points(t);
        auto rule = tri_rule_midpoint(pts);
        Point2 g = triangle_centroid(pts);
        const auto& edges = mesh.triangle_edges(t);

        // gradients: CR basis i has constant gradient; bubble gradient is x - x_G
        std::array<Vec2, 3> crg{};
        {
            std::array<Vec2, 3> bg = {rot90(pts[2] - pts[1]) / (2.0 * mesh.area(t)),
                                      rot90(pts[0] - pts[2]) / (2.0 * mesh.area(t)),
                                      rot90(pts[1] - pts[0]) / (2.0 * mesh.area(t))};
            for (int i = 0; i < 3; ++i) crg[i] = -2.0 * bg[i];
        }

        std::array<int, 3> red{};
        for (int i = 0; i < 3; ++i) red[i] = cr.reduced_index[edges[i]];

        for (int i = 0; i < 3; ++i) {
            if (red[i] < 0) continue;
            for (int jj = 0; jj < 3; ++jj) {
                if (red[jj] < 0) continue;
                double v = integrate(rule, [&](Point2) { return dot(crg[i], crg[jj]); });
                trip.emplace_back(red[i], red[jj], v);
            }
            double cross_term = integrate(rule, [&](Point2 x) { return dot(crg[i], x - g); });
            trip.emplace_back(red[i], ncr + t, cross_term);
            trip.emplace_back(ncr + t, red[i], cross_term);
        }
        double diag = integrate(rule, [&](Point2 x) { return squared_norm(x - g); });
        trip.emplace_back(ncr + t, ncr + t, diag);

        // loads
        for (int i = 0; i < 3; ++i) {
            if (red[i] < 0) continue;
            b[red[i]] += fbar.value[t] * mesh.area(t) / 3.0;
        }
        b[ncr + t] += fbar.value[t] * integrate(rule, [&](Point2 x) { return bubble_value(pts, x); });
    }

    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(A);
    if (chol.info() != Eigen::Success || chol.vectorD().minCoeff() <= 0.0) {
        throw NumericalError("solve_enriched: factorization failed");
    }
    Eigen::VectorXd x = chol.solve(b);
    double rel = (A * x - b).norm() / std::max(b.norm(), 1e-300);
    if (!(rel <= opts.residual_tol)) {
        throw NumericalError("solve_enriched: residual " + std::to_string(rel));
    }

    EnrichedSolution out;
    out.u_star.mesh = &mesh;
    out.u_star.edge_value.assign(mesh.n_edges(), 0.0);
    for (int r = 0; r < ncr; ++r) out.u_star.edge_value[cr.entity_of[r]] = x[r];
    out.bubbles.alpha_k.resize(ntri);
    for (int t = 0; t < ntri; ++t) out.bubbles.alpha_k[t] = x[ncr + t];
    return out;
}

void write_flux_csv(std::ostream& out, const RtFlux& p, const PwConstant& fbar) {
    out << "tri_index,ax,ay,c,fbar\n";
    for (size_t t = 0; t < p.a.size(); ++t) {
        out << t << ',' << fmt17(p.a[t].x1) << ',' << fmt17(p.a[t].x2) << ',' << fmt17(p.c[t])
            << ',' << fmt17(fbar.value[t]) << '\n';
    }
}

} // namespace femcert
