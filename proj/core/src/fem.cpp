#include "femcert/fem.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

#include "femcert/csvfmt.hpp"
#include "femcert/quadrature.hpp"

namespace femcert {

namespace {

// Gradients of the barycentric coordinates; grad(lambda_i) is constant.
std::array<Vec2, 3> barycentric_gradients(const std::array<Point2, 3>& p, double area) {
    return {rot90(p[2] - p[1]) / (2.0 * area),
            rot90(p[0] - p[2]) / (2.0 * area),
            rot90(p[1] - p[0]) / (2.0 * area)};
}

std::array<double, 3> barycentric(const std::array<Point2, 3>& p, double area, Point2 x) {
    return {signed_area(x, p[1], p[2]) / area,
            signed_area(p[0], x, p[2]) / area,
            signed_area(p[0], p[1], x) / area};
}

DofMap finalize_dofmap(DofMap map) {
    map.reduced_index.assign(map.dirichlet.size(), -1);
    for (size_t i = 0; i < map.dirichlet.size(); ++i) {
        if (!map.dirichlet[i]) {
            map.reduced_index[i] = static_cast<int>(map.entity_of.size());
            map.entity_of.push_back(static_cast<int>(i));
        }
    }
    return map;
}

Eigen::SparseMatrix<double> assemble_p1_like(const Mesh& mesh, bool cr) {
    const int n = cr ? mesh.n_edges() : mesh.n_vertices();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.n_triangles()) * 9);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto pts = mesh.triangle_points(t);
        double area = mesh.area(t);
        auto g = barycentric_gradients(pts, area);
        // CR basis for the edge opposite vertex i is 1 - 2 lambda_i.
        double factor = cr ? 4.0 : 1.0;
        std::array<int, 3> idx{};
        for (int i = 0; i < 3; ++i) {
            idx[i] = cr ? mesh.triangle_edges(t)[i] : mesh.triangle(t)[i];
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                double v = factor * area * dot(g[i], g[j]);
                trip.emplace_back(idx[i], idx[j], v);
                if (i != j) trip.emplace_back(idx[j], idx[i], v);
            }
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

} // namespace

DofMap make_cr_dofmap(const Mesh& mesh) {
    DofMap map;
    map.space = SpaceTag::cr_edge;
    map.dirichlet.resize(mesh.n_edges());
    for (int e = 0; e < mesh.n_edges(); ++e) map.dirichlet[e] = mesh.edge(e).boundary;
    return finalize_dofmap(std::move(map));
}

DofMap make_conforming_dofmap(const Mesh& mesh) {
    DofMap map;
    map.space = SpaceTag::conforming_vertex;
    map.dirichlet.resize(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) map.dirichlet[v] = mesh.vertex_on_boundary(v);
    return finalize_dofmap(std::move(map));
}

AssembledSystem assemble_cr(const Mesh& mesh) {
    return {assemble_p1_like(mesh, true), make_cr_dofmap(mesh)};
}

AssembledSystem assemble_conforming(const Mesh& mesh) {
    return {assemble_p1_like(mesh, false), make_conforming_dofmap(mesh)};
}

Eigen::SparseMatrix<double> assemble_conforming_mass(const Mesh& mesh) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.n_triangles()) * 9);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangle(t);
        double a12 = mesh.area(t) / 12.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                trip.emplace_back(tr[i], tr[j], (i == j ? 2.0 : 1.0) * a12);
            }
        }
    }
    Eigen::SparseMatrix<double> M(mesh.n_vertices(), mesh.n_vertices());
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

Eigen::VectorXd assemble_cr_load(const Mesh& mesh, const ScalarField& f) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_edges());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto pts = mesh.triangle_points(t);
        double area = mesh.area(t);
        auto rule = tri_rule_deg5(pts);
        const auto& edges = mesh.triangle_edges(t);
        for (const auto& q : rule) {
            auto lam = barycentric(pts, area, q.x);
            double fv = f.value(q.x);
            for (int i = 0; i < 3; ++i) {
                b[edges[i]] += q.w * fv * (1.0 - 2.0 * lam[i]);
            }
        }
    }
    return b;
}

Eigen::VectorXd assemble_cr_load(const Mesh& mesh, const PwConstant& fbar) {
    // integral of each CR basis function over its triangle is |K|/3
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_edges());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        double w = fbar.value[t] * mesh.area(t) / 3.0;
        for (int e : mesh.triangle_edges(t)) b[e] += w;
    }
    return b;
}

Eigen::VectorXd assemble_conforming_load(const Mesh& mesh, const ScalarField& f) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_vertices());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto pts = mesh.triangle_points(t);
        double area = mesh.area(t);
        auto rule = tri_rule_deg5(pts);
        const auto& tr = mesh.triangle(t);
        for (const auto& q : rule) {
            auto lam = barycentric(pts, area, q.x);
            double fv = f.value(q.x);
            for (int i = 0; i < 3; ++i) b[tr[i]] += q.w * fv * lam[i];
        }
    }
    return b;
}

Eigen::VectorXd assemble_conforming_load(const Mesh& mesh, const PwConstant& fbar) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_vertices());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        double w = fbar.value[t] * mesh.area(t) / 3.0;
        for (int v : mesh.triangle(t)) b[v] += w;
    }
    return b;
}

Eigen::VectorXd solve_reduced(const AssembledSystem& system, const Eigen::VectorXd& full_load,
                              const SolveOptions& opts) {
    const DofMap& map = system.dofmap;
    const int nr = map.n_reduced();
    Eigen::VectorXd full = Eigen::VectorXd::Zero(map.n_entities());
    if (nr == 0) return full;
    if (nr == map.n_entities()) {
        throw NumericalError("solve_reduced: no Dirichlet degrees of freedom, system is singular");
    }

    Eigen::SparseMatrix<double> A(nr, nr);
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(system.stiffness.nonZeros());
        for (int k = 0; k < system.stiffness.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(system.stiffness, k); it; ++it) {
                int ri = map.reduced_index[it.row()];
                int rj = map.reduced_index[it.col()];
                if (ri >= 0 && rj >= 0) trip.emplace_back(ri, rj, it.value());
            }
        }
        A.setFromTriplets(trip.begin(), trip.end());
    }
    Eigen::VectorXd b(nr);
    for (int r = 0; r < nr; ++r) b[r] = full_load[map.entity_of[r]];

    Eigen::VectorXd x;
    if (nr <= opts.direct_dof_limit) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(A);
        if (chol.info() != Eigen::Success) {
            throw NumericalError("solve_reduced: sparse Cholesky factorization failed");
        }
        if (chol.vectorD().minCoeff() <= 0.0) {
            throw NumericalError("solve_reduced: reduced matrix is not positive definite");
        }
        x = chol.solve(b);
    } else {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>> cg;
        cg.setTolerance(opts.cg_tol);
        cg.setMaxIterations(20L * nr);
        cg.compute(A);
        x = cg.solve(b);
        if (cg.info() != Eigen::Success) {
            throw NumericalError("solve_reduced: CG did not converge, error estimate " +
                                 std::to_string(cg.error()));
        }
    }

    double bnorm = b.norm();
    double resid = (A * x - b).norm();
    double rel = bnorm > 0.0 ? resid / bnorm : resid;
    if (!(rel <= opts.residual_tol)) {
        throw NumericalError("solve_reduced: relative residual " + std::to_string(rel) +
                             " exceeds tolerance");
    }

    for (int r = 0; r < nr; ++r) full[map.entity_of[r]] = x[r];
    return full;
}

CrSolution solve_poisson_cr(const Mesh& mesh, const ScalarField& f, const SolveOptions& opts) {
    AssembledSystem sys = assemble_cr(mesh);
    Eigen::VectorXd u = solve_reduced(sys, assemble_cr_load(mesh, f), opts);
    CrSolution sol{&mesh, std::vector<double>(u.data(), u.data() + u.size())};
    return sol;
}

ConformingSolution solve_poisson_conforming(const Mesh& mesh, const ScalarField& f,
                                            const SolveOptions& opts) {
    AssembledSystem sys = assemble_conforming(mesh);
    Eigen::VectorXd u = solve_reduced(sys, assemble_conforming_load(mesh, f), opts);
    return {&mesh, std::vector<double>(u.data(), u.data() + u.size())};
}

ConformingSolution solve_poisson_conforming(const Mesh& mesh, const PwConstant& fbar,
                                            const SolveOptions& opts) {
    AssembledSystem sys = assemble_conforming(mesh);
    Eigen::VectorXd u = solve_reduced(sys, assemble_conforming_load(mesh, fbar), opts);
    return {&mesh, std::vector<double>(u.data(), u.data() + u.size())};
}

PwConstant project_mean(const Mesh& mesh, const ScalarField& f) {
    PwConstant out;
    out.value.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto rule = tri_rule_deg5(mesh.triangle_points(t));
        out.value[t] = integrate(rule, f.value) / mesh.area(t);
    }
    return out;
}

CrSolution interpolate_cr(const Mesh& mesh, const ScalarField& v) {
    CrSolution out{&mesh, std::vector<double>(mesh.n_edges())};
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& ed = mesh.edge(e);
        out.edge_value[e] = segment_mean(mesh.vertex(ed.v[0]), mesh.vertex(ed.v[1]), v.value);
    }
    return out;
}

Vec2 cr_gradient(const CrSolution& u, int t) {
    const Mesh& mesh = *u.mesh;
    auto pts = mesh.triangle_points(t);
    auto g = barycentric_gradients(pts, mesh.area(t));
    Vec2 grad{0.0, 0.0};
    const auto& edges = mesh.triangle_edges(t);
    for (int i = 0; i < 3; ++i) grad += (-2.0 * u.edge_value[edges[i]]) * g[i];
    return grad;
}

double cr_value(const CrSolution& u, int t, Point2 x) {
    const Mesh& mesh = *u.mesh;
    auto pts = mesh.triangle_points(t);
    auto lam = barycentric(pts, mesh.area(t), x);
    double v = 0.0;
    const auto& edges = mesh.triangle_edges(t);
    for (int i = 0; i < 3; ++i) v += u.edge_value[edges[i]] * (1.0 - 2.0 * lam[i]);
    return v;
}

Vec2 conforming_gradient(const ConformingSolution& u, int t) {
    const Mesh& mesh = *u.mesh;
    auto pts = mesh.triangle_points(t);
    auto g = barycentric_gradients(pts, mesh.area(t));
    Vec2 grad{0.0, 0.0};
    const auto& tr = mesh.triangle(t);
    for (int i = 0; i < 3; ++i) grad += u.vertex_value[tr[i]] * g[i];
    return grad;
}

double conforming_value(const ConformingSolution& u, int t, Point2 x) {
    const Mesh& mesh = *u.mesh;
    auto pts = mesh.triangle_points(t);
    auto lam = barycentric(pts, mesh.area(t), x);
    const auto& tr = mesh.triangle(t);
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += u.vertex_value[tr[i]] * lam[i];
    return v;
}

namespace {

template <class GradFn>
double broken_energy_error(const Mesh& mesh, const ScalarField& exact, GradFn&& grad_h) {
    double s = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        Vec2 gh = grad_h(t);
        auto rule = tri_rule_deg5(mesh.triangle_points(t));
        s += integrate(rule, [&](Point2 x) { return squared_norm(exact.gradient(x) - gh); });
    }
    return std::sqrt(s);
}

template <class ValFn>
double broken_l2_error(const Mesh& mesh, const ScalarField& exact, ValFn&& val_h) {
    double s = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto rule = tri_rule_deg5(mesh.triangle_points(t));
        s += integrate(rule, [&](Point2 x) {
            double d = exact.value(x) - val_h(t, x);
            return d * d;
        });
    }
    return std::sqrt(s);
}

} // namespace

double energy_error(const Mesh& mesh, const CrSolution& u, const ScalarField& exact) {
    return broken_energy_error(mesh, exact, [&](int t) { return cr_gradient(u, t); });
}

double energy_error(const Mesh& mesh, const ConformingSolution& u, const ScalarField& exact) {
    return broken_energy_error(mesh, exact, [&](int t) { return conforming_gradient(u, t); });
}

double l2_error(const Mesh& mesh, const CrSolution& u, const ScalarField& exact) {
    return broken_l2_error(mesh, exact, [&](int t, Point2 x) { return cr_value(u, t, x); });
}

double l2_error(const Mesh& mesh, const ConformingSolution& u, const ScalarField& exact) {
    return broken_l2_error(mesh, exact,
                           [&](int t, Point2 x) { return conforming_value(u, t, x); });
}

void write_cr_csv(std::ostream& out, const CrSolution& u) {
    const Mesh& mesh = *u.mesh;
    out << "edge_index,midpoint_x1,midpoint_x2,value\n";
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& ed = mesh.edge(e);
        out << e << ',' << fmt17(ed.midpoint.x1) << ',' << fmt17(ed.midpoint.x2) << ','
            << fmt17(u.edge_value[e]) << '\n';
    }
}

void write_conforming_csv(std::ostream& out, const ConformingSolution& u) {
    const Mesh& mesh = *u.mesh;
    out << "vertex_index,x1,x2,value\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const Point2& p = mesh.vertex(v);
        out << v << ',' << fmt17(p.x1) << ',' << fmt17(p.x2) << ',' << fmt17(u.vertex_value[v])
            << '\n';
    }
}

} // namespace femcert
