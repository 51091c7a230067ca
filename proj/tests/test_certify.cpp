#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "femcert/certify.hpp"
#include "femcert/constants.hpp"
#include "femcert/field.hpp"
#include "oracles.hpp"

using namespace femcert;

TEST_CASE("global constants on friedrichs-keller meshes") {
    for (int N : {2, 8}) {
        Mesh m = generate_friedrichs_keller(N);
        GlobalConstants gc = global_constants(m);
        CHECK(gc.h_star == doctest::Approx(1.0 / N).epsilon(1e-14));
        CHECK(gc.c0h == doctest::Approx(1.0 / M_PI).epsilon(1e-13));
        CHECK(gc.c12h == doctest::Approx(0.2464562258).epsilon(1e-9));
        CHECK(gc.c12h < 0.25);
        CHECK(gc.c6h == doctest::Approx(solve_c1_transcendental()).epsilon(1e-12));
        CHECK(gc.c6h < 0.5);
        CHECK(gc.gamma1 <= gc.c0h);
        CHECK(gc.gamma0 <= gc.c0h * gc.c12h + 1e-15);
        CHECK(gc.gamma2 == gc.c6h);
        CHECK(gc.gamma3 == gc.c0h);
        CHECK(gc.max_theta == doctest::Approx(M_PI / 2.0));
    }
}

TEST_CASE("global constants on a single equilateral triangle") {
    Mesh m({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}}, {{0, 1, 2}});
    GlobalConstants gc = global_constants(m);
    double c = shape_factor(M_PI / 3.0) * solve_c1_transcendental();
    CHECK(gc.c6h == doctest::Approx(std::sqrt(3.0) * c).epsilon(1e-12));
}

TEST_CASE("a priori energy bound values") {
    Mesh m = generate_friedrichs_keller(4);
    GlobalConstants gc = global_constants(m);
    const double norm_f = 0.5;
    const double f1 = M_PI / std::sqrt(2.0);

    // the concrete display for this mesh family, with the coarser bound 1/2
    // in the flux-interpolation slot:
    //   h { (1/pi^2) ||f||^2 + (||f||/2 + (h/pi^2) |f|_1)^2 }^(1/2)
    double h = 0.25;
    double display = h * std::sqrt(norm_f * norm_f / (M_PI * M_PI) +
                                   std::pow(0.5 * norm_f + h / (M_PI * M_PI) * f1, 2));
    CHECK(display == doctest::Approx(0.0863).epsilon(0.0058)); // 0.0863 +- 0.0005

    double bound = apriori_energy_bound(gc, norm_f, f1);
    CHECK(bound <= display + 1e-12);       // sharper constant in the gamma2 slot
    CHECK(std::abs(bound - 0.0863) < 1e-3);

    CHECK(apriori_energy_bound(gc, 0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(apriori_energy_bound(gc, -1.0, {}), std::invalid_argument);

    // halves to first order when N doubles
    Mesh m32 = generate_friedrichs_keller(32);
    Mesh m64 = generate_friedrichs_keller(64);
    double b32 = apriori_energy_bound(global_constants(m32), norm_f, f1);
    double b64 = apriori_energy_bound(global_constants(m64), norm_f, f1);
    CHECK(b32 / b64 > 1.9);
    CHECK(b32 / b64 < 2.1);

    // without the H1 seminorm the bound is valid but larger
    CHECK(apriori_energy_bound(gc, norm_f) >= bound);
}

TEST_CASE("a priori l2 bound") {
    Mesh m = generate_friedrichs_keller(8);
    GlobalConstants gc = global_constants(m);

    CHECK(apriori_l2_bound(gc, 0.0, 0.0) == 0.0);

    // degenerate quadratic: with gamma3 = 0 the bound is h * A1
    GlobalConstants flat = gc;
    flat.gamma3 = 0.0;
    double g = 0.3, F = 0.5;
    double a1 = (flat.gamma1 + flat.gamma2) * g + (flat.gamma0 + flat.gamma1 * flat.gamma2) *
                flat.h_star * F;
    CHECK(apriori_l2_bound(flat, g, F) == doctest::Approx(flat.h_star * a1).epsilon(1e-14));

    // the returned value is exactly the positive root of e^2 = h A1 e + h^2 A2
    double e = apriori_l2_bound(gc, g, F);
    double load_term = gc.gamma0 * gc.h_star * F;
    double A1 = (gc.gamma1 + gc.gamma2) * g + gc.gamma1 * gc.gamma2 * gc.h_star * F + load_term;
    double A2 = gc.gamma3 * gc.gamma3 * gc.h_star * g * g;
    CHECK(std::abs(e * e - (gc.h_star * A1 * e + gc.h_star * gc.h_star * A2)) < 1e-12);

    // order two in h when fed the certified energy surrogate
    std::vector<double> hs, bounds;
    for (int N : {8, 16, 32, 64}) {
        GlobalConstants g2 = global_constants(generate_friedrichs_keller(N));
        double be = apriori_energy_bound(g2, 0.5, M_PI / std::sqrt(2.0));
        hs.push_back(g2.h_star);
        bounds.push_back(apriori_l2_bound(g2, be, 0.5, M_PI / std::sqrt(2.0)));
    }
    CHECK(oracle::log_slope(hs, bounds) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("bound formulas are monotone in every constant") {
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> ug(0.05, 0.8);
    std::uniform_real_distribution<double> bump(0.0, 0.3);
    for (int k = 0; k < 50; ++k) {
        GlobalConstants gc;
        gc.h_star = ug(rng);
        gc.gamma0 = ug(rng);
        gc.gamma1 = ug(rng);
        gc.gamma2 = ug(rng);
        gc.gamma3 = ug(rng);
        GlobalConstants larger = gc;
        larger.h_star += bump(rng);
        larger.gamma0 += bump(rng);
        larger.gamma1 += bump(rng);
        larger.gamma2 += bump(rng);
        larger.gamma3 += bump(rng);

        double F = ug(rng), f1 = ug(rng), g = ug(rng);
        CHECK(apriori_energy_bound(larger, F, f1) >= apriori_energy_bound(gc, F, f1));
        CHECK(apriori_energy_bound(larger, F) >= apriori_energy_bound(gc, F));
        CHECK(apriori_l2_bound(larger, g, F, f1) >= apriori_l2_bound(gc, g, F, f1));
        CHECK(apriori_l2_bound(larger, g, F) >= apriori_l2_bound(gc, g, F));
    }
}

TEST_CASE("hypercircle with piecewise-constant data has zero oscillation") {
    Mesh m = generate_friedrichs_keller(6);
    ScalarField f = constant_load(1.0);
    GlobalConstants gc = global_constants(m);
    PwConstant fbar = project_mean(m, f);
    CrSolution u_star = solve_modified_cr(m, fbar);
    RtFlux p = build_rt_flux(m, u_star, fbar);
    ConformingSolution v = solve_poisson_conforming(m, fbar); // discrete minimizer of ||grad v - p||

    HypercircleBound hb = aposteriori_hypercircle(m, p, v, gc, f);
    CHECK(hb.oscillation < 1e-12);
    CHECK(hb.bound_flux == doctest::Approx(hb.flux_distance).epsilon(1e-10));
    CHECK(hb.bound_mid == doctest::Approx(0.5 * hb.flux_distance).epsilon(1e-10));

    // any other conforming field is at least as far from p
    ConformingSolution w = v;
    for (int i = 0; i < m.n_vertices(); ++i) {
        if (!m.vertex_on_boundary(i)) w.vertex_value[i] += 0.01 * ((i % 3) - 1.0);
    }
    CHECK(grad_distance(m, w, p) >= hb.flux_distance - 1e-13);
}

TEST_CASE("grad_distance quadrature degree suffices") {
    Mesh m = generate_friedrichs_keller(5);
    PwConstant fbar = project_mean(m, sinsin_load());
    CrSolution u_star = solve_modified_cr(m, fbar);
    RtFlux p = build_rt_flux(m, u_star, fbar);
    ConformingSolution v = solve_poisson_conforming(m, fbar);

    double d2 = grad_distance(m, v, p);
    // independent degree-8 evaluation of the same piecewise-polynomial integral
    double s = 0.0;
    for (int t = 0; t < m.n_triangles(); ++t) {
        Vec2 gv = conforming_gradient(v, t);
        s += oracle::integrate_triangle(m.triangle_points(t), [&](Point2 x) {
            return squared_norm(gv - rt_value(p, t, x));
        });
    }
    CHECK(std::abs(d2 - std::sqrt(s)) < 1e-13);
}

TEST_CASE("hypercircle guarantee on the manufactured solution") {
    ScalarField f = sinsin_load();
    ScalarField exact = sinsin_exact();
    for (int N : {4, 8, 16}) {
        Mesh m = generate_friedrichs_keller(N);
        RunResult r = certified_solve(m, f, &exact);
        CHECK(r.report.apost_flux >= *r.report.true_flux_error);
        CHECK(r.report.apost_mid >= *r.report.true_mid_error);
        CHECK(r.report.apost_mid <= r.report.apost_flux);
    }
}

TEST_CASE("smoothed cr field is conforming and usable in the hypercircle") {
    Mesh m = generate_friedrichs_keller(8);
    ScalarField f = sinsin_load();
    ScalarField exact = sinsin_exact();
    GlobalConstants gc = global_constants(m);
    PwConstant fbar = project_mean(m, f);
    CrSolution u_star = solve_modified_cr(m, fbar);
    RtFlux p = build_rt_flux(m, u_star, fbar);

    ConformingSolution smooth = smooth_cr_to_vertices(m, u_star);
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (m.vertex_on_boundary(v)) CHECK(smooth.vertex_value[v] == 0.0);
    }
    HypercircleBound hb = aposteriori_hypercircle(m, p, smooth, gc, f);
    CHECK(hb.bound_flux >= flux_error(m, p, exact));
}

TEST_CASE("convergence study: orders, guarantees, csv") {
    ScalarField f = sinsin_load();
    ScalarField exact = sinsin_exact();
    std::vector<int> Ns = {4, 8, 16, 32};
    auto reports = convergence_study(f, exact, Ns);
    REQUIRE(reports.size() == Ns.size());

    std::vector<double> h, ee, le;
    for (size_t i = 0; i < reports.size(); ++i) {
        const BoundReport& r = reports[i];
        CHECK(r.N == Ns[i]);
        CHECK(*r.apriori_energy >= *r.true_energy_error);
        CHECK(*r.apriori_l2 >= *r.true_l2_error);
        CHECK(r.apost_flux >= *r.true_flux_error);
        CHECK(r.apost_mid >= *r.true_mid_error);
        CHECK(std::isfinite(*r.eff_energy));
        CHECK(std::isfinite(*r.eff_apost));
        CHECK(*r.eff_energy >= 1.0);
        CHECK(*r.eff_apost >= 1.0);
        h.push_back(r.h_star);
        ee.push_back(*r.true_energy_error);
        le.push_back(*r.true_l2_error);
    }
    CHECK(oracle::log_slope(h, ee) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(oracle::log_slope(h, le) == doctest::Approx(2.0).epsilon(0.075));

    // the a priori efficiency index is large but stable under refinement
    // (bound and error share the first-order rate)
    double eff_first = *reports.front().eff_energy;
    double eff_last = *reports.back().eff_energy;
    CHECK(eff_last <= 1.5 * eff_first);
    CHECK(eff_last >= eff_first / 1.5);

    std::ostringstream csv;
    write_report_csv(csv, reports, true);
    std::string text = csv.str();
    CHECK(text.rfind("N,h,energy_err,l2_err,apriori_energy,apriori_l2,apost_flux,apost_mid,"
                     "eff_energy,eff_apost\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') ==
          static_cast<long>(1 + Ns.size() + 1)); // header + rows + slope footer
    CHECK(text.find("# slope_energy=") != std::string::npos);
}

TEST_CASE("non-convex option disables only the a priori bounds") {
    Mesh m = generate_friedrichs_keller(4);
    ScalarField f = sinsin_load();
    CertifyOptions opts;
    opts.convex = false;
    RunResult r = certified_solve(m, f, nullptr, opts);
    CHECK(!r.report.apriori_energy.has_value());
    CHECK(!r.report.apriori_l2.has_value());
    CHECK(r.report.apost_flux > 0.0);
    CHECK(!r.report.true_energy_error.has_value());
}

TEST_CASE("fit_log_slope recovers exact powers") {
    std::vector<double> x = {1.0, 0.5, 0.25, 0.125};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * v * v);
    CHECK(fit_log_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
}
