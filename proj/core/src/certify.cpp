#include "femcert/certify.hpp"

#include <cmath>
#include <ostream>

#include "femcert/constants.hpp"
#include "femcert/csvfmt.hpp"
#include "femcert/parallel.hpp"
#include "femcert/quadrature.hpp"

namespace femcert {

GlobalConstants global_constants(const Mesh& mesh) {
    GlobalConstants gc;
    const double c1 = solve_c1_transcendental();
    const double c12 = solve_c12_transcendental();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriangleShape& s = mesh.shape(t);
        if (!s.in_range()) throw MeshError("global_constants: triangle shape out of range");
        double sf = shape_factor(s.theta);
        gc.h_star = std::max(gc.h_star, s.h);
        gc.c0h = std::max(gc.c0h, sf * c0_exact());
        gc.c12h = std::max(gc.c12h, sf * c12);
        gc.c6h = std::max(gc.c6h, c6_closed_form(s.alpha, s.theta, sf * c1, sf * c1));
        gc.max_theta = std::max(gc.max_theta, s.theta);
    }
    gc.gamma0 = gc.c0h * gc.c12h;
    gc.gamma1 = gc.c0h;
    gc.gamma2 = gc.c6h;
    gc.gamma3 = gc.c0h;
    return gc;
}

double apriori_energy_bound(const GlobalConstants& gc, double norm_f,
                            std::optional<double> seminorm_f1) {
    if (norm_f < 0.0 || (seminorm_f1 && *seminorm_f1 < 0.0)) {
        throw std::invalid_argument("apriori_energy_bound: negative norm");
    }
    const double h = gc.h_star;
    const double u2 = norm_f; // |u|_2 <= ||f|| on convex domains
    double tail = seminorm_f1 ? gc.gamma3 * gc.gamma3 * h * (*seminorm_f1) : gc.gamma3 * norm_f;
    double b = gc.gamma2 * u2 + tail;
    return h * std::sqrt(gc.gamma1 * gc.gamma1 * u2 * u2 + b * b);
}

double apriori_l2_bound(const GlobalConstants& gc, double norm_grad_eh, double norm_f,
                        std::optional<double> seminorm_f1) {
    if (norm_grad_eh < 0.0 || norm_f < 0.0) {
        throw std::invalid_argument("apriori_l2_bound: negative norm");
    }
    const double h = gc.h_star;
    double load_term = gc.gamma0 * h * norm_f;
    if (seminorm_f1) load_term = std::min(load_term, gc.gamma0 * gc.gamma3 * h * h * (*seminorm_f1));
    double a1 = (gc.gamma1 + gc.gamma2) * norm_grad_eh + gc.gamma1 * gc.gamma2 * h * norm_f +
                load_term;
    double a2 = gc.gamma3 * gc.gamma3 * h * norm_grad_eh * norm_grad_eh;
    return 0.5 * h * (a1 + std::sqrt(a1 * a1 + 4.0 * a2));
}

double grad_distance(const Mesh& mesh, const ConformingSolution& v, const RtFlux& p) {
    double s = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        Vec2 gv = conforming_gradient(v, t);
        auto rule = tri_rule_midpoint(mesh.triangle_points(t));
        s += integrate(rule, [&](Point2 x) { return squared_norm(gv - rt_value(p, t, x)); });
    }
    return std::sqrt(s);
}

double data_oscillation(const Mesh& mesh, const ScalarField& f, const PwConstant& fbar) {
    double s = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto rule = tri_rule_deg5(mesh.triangle_points(t));
        double mean = fbar.value[t];
        s += integrate(rule, [&](Point2 x) {
            double d = f.value(x) - mean;
            return d * d;
        });
    }
    return std::sqrt(s);
}

double flux_error(const Mesh& mesh, const RtFlux& p, const ScalarField& exact) {
    double s = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto rule = tri_rule_deg5(mesh.triangle_points(t));
        s += integrate(rule, [&](Point2 x) {
            return squared_norm(exact.gradient(x) - rt_value(p, t, x));
        });
    }
    return std::sqrt(s);
}

double mid_error(const Mesh& mesh, const RtFlux& p, const ConformingSolution& v,
                 const ScalarField& exact) {
    double s = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        Vec2 gv = conforming_gradient(v, t);
        auto rule = tri_rule_deg5(mesh.triangle_points(t));
        s += integrate(rule, [&](Point2 x) {
            Vec2 mid = 0.5 * (gv + rt_value(p, t, x));
            return squared_norm(exact.gradient(x) - mid);
        });
    }
    return std::sqrt(s);
}

HypercircleBound aposteriori_hypercircle(const Mesh& mesh, const RtFlux& p,
                                         const ConformingSolution& v, const GlobalConstants& gc,
                                         const ScalarField& f) {
    if (p.mesh != &mesh || v.mesh != &mesh) {
        throw std::invalid_argument("aposteriori_hypercircle: mesh mismatch");
    }
    PwConstant fbar;
    fbar.value.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) fbar.value[t] = -2.0 * p.c[t];

    HypercircleBound out;
    out.flux_distance = grad_distance(mesh, v, p);
    double osc = gc.gamma3 * gc.h_star * data_oscillation(mesh, f, fbar);
    if (f.h1_seminorm) {
        osc = std::min(osc, gc.gamma3 * gc.gamma3 * gc.h_star * gc.h_star * (*f.h1_seminorm));
    }
    out.oscillation = osc;
    out.bound_flux = osc + out.flux_distance;
    out.bound_mid = osc + 0.5 * out.flux_distance;
    return out;
}

ConformingSolution smooth_cr_to_vertices(const Mesh& mesh, const CrSolution& u) {
    std::vector<double> acc(mesh.n_vertices(), 0.0);
    std::vector<int> count(mesh.n_vertices(), 0);
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& ed = mesh.edge(e);
        for (int v : ed.v) {
            acc[v] += u.edge_value[e];
            ++count[v];
        }
    }
    ConformingSolution out{&mesh, std::vector<double>(mesh.n_vertices(), 0.0)};
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (!mesh.vertex_on_boundary(v) && count[v] > 0) out.vertex_value[v] = acc[v] / count[v];
    }
    return out;
}

RunResult certified_solve(const Mesh& mesh, const ScalarField& f, const ScalarField* exact,
                          const CertifyOptions& opts) {
    RunResult r;
    r.gc = global_constants(mesh);
    r.fbar = project_mean(mesh, f);
    r.u_h = solve_poisson_cr(mesh, f, opts.solve);
    r.u_star = solve_modified_cr(mesh, r.fbar, opts.solve);
    r.p = build_rt_flux(mesh, r.u_star, r.fbar);
    r.v = solve_poisson_conforming(mesh, r.fbar, opts.solve);

    BoundReport& rep = r.report;
    rep.h_star = r.gc.h_star;

    ScalarField load = f;
    attach_norms_from_mesh(load, mesh);
    const double norm_f = *load.l2_norm;

    if (opts.convex) {
        double be = apriori_energy_bound(r.gc, norm_f, load.h1_seminorm);
        rep.apriori_energy = be;
        rep.apriori_l2 = apriori_l2_bound(r.gc, be, norm_f, load.h1_seminorm);
        rep.grad_surrogate = "apriori_energy";
    } else {
        rep.grad_surrogate = "none";
    }

    HypercircleBound hyper = aposteriori_hypercircle(mesh, r.p, r.v, r.gc, f);
    rep.apost_flux = hyper.bound_flux;
    rep.apost_mid = hyper.bound_mid;

    if (exact && exact->has_gradient()) {
        rep.true_energy_error = energy_error(mesh, r.u_h, *exact);
        rep.true_l2_error = l2_error(mesh, r.u_h, *exact);
        rep.true_flux_error = flux_error(mesh, r.p, *exact);
        rep.true_mid_error = mid_error(mesh, r.p, r.v, *exact);
        if (rep.apriori_energy && *rep.true_energy_error > 0.0) {
            rep.eff_energy = *rep.apriori_energy / *rep.true_energy_error;
        }
        if (*rep.true_flux_error > 0.0) {
            rep.eff_apost = rep.apost_flux / *rep.true_flux_error;
        }
    }
    return r;
}

std::vector<BoundReport> convergence_study(const ScalarField& f, const ScalarField& exact,
                                           const std::vector<int>& Ns,
                                           const CertifyOptions& opts) {
    std::vector<BoundReport> reports(Ns.size());
    parallel_for(static_cast<int>(Ns.size()), opts.threads, [&](int i) {
        Mesh mesh = generate_friedrichs_keller(Ns[i]);
        RunResult r = certified_solve(mesh, f, &exact, opts);
        r.report.N = Ns[i];
        reports[i] = std::move(r.report);
    });
    return reports;
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = std::min(x.size(), y.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_report_csv(std::ostream& out, const std::vector<BoundReport>& reports,
                      bool footer_slopes) {
    out << "N,h,energy_err,l2_err,apriori_energy,apriori_l2,apost_flux,apost_mid,eff_energy,"
           "eff_apost\n";
    for (const BoundReport& r : reports) {
        out << r.N << ',' << fmt17(r.h_star) << ',' << csv_cell(r.true_energy_error) << ','
            << csv_cell(r.true_l2_error) << ',' << csv_cell(r.apriori_energy) << ','
            << csv_cell(r.apriori_l2) << ',' << fmt17(r.apost_flux) << ',' << fmt17(r.apost_mid)
            << ',' << csv_cell(r.eff_energy) << ',' << csv_cell(r.eff_apost) << '\n';
    }
    if (footer_slopes) {
        std::vector<double> h, ee, le;
        for (const BoundReport& r : reports) {
            if (r.true_energy_error && r.true_l2_error) {
                h.push_back(r.h_star);
                ee.push_back(*r.true_energy_error);
                le.push_back(*r.true_l2_error);
            }
        }
        if (h.size() >= 2) {
            out << "# slope_energy=" << fmt17(fit_log_slope(h, ee))
                << " slope_l2=" << fmt17(fit_log_slope(h, le)) << '\n';
        }
    }
}

} // namespace femcert
