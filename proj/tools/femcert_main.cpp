// Command-line front end: mesh generation, constant atlases, certified
// solves and convergence studies, with CSV and SVG output.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "femcert/certify.hpp"
#include "femcert/constants.hpp"
#include "femcert/csvfmt.hpp"
#include "femcert/errors.hpp"
#include "femcert/field.hpp"
#include "femcert/flux.hpp"
#include "femcert/mesh.hpp"
#include "femcert/parallel.hpp"
#include "svgplot.hpp"

namespace {

using namespace femcert;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

ScalarField parse_load(const std::string& spec) {
    if (spec == "builtin:sinsin") return sinsin_load();
    if (spec.rfind("builtin:const:", 0) == 0) {
        try {
            return constant_load(std::stod(spec.substr(14)));
        } catch (const std::exception&) {
            throw ConfigError("bad constant in load spec '" + spec + "'");
        }
    }
    if (spec.rfind("builtin:poly:", 0) == 0) {
        auto toks = split(spec.substr(13), ',');
        if (toks.size() != 6) {
            throw ConfigError("builtin:poly expects 6 comma-separated coefficients");
        }
        std::array<double, 6> c{};
        try {
            for (int i = 0; i < 6; ++i) c[i] = std::stod(toks[i]);
        } catch (const std::exception&) {
            throw ConfigError("bad coefficient in load spec '" + spec + "'");
        }
        return poly_load(c);
    }
    throw ConfigError("unknown load spec '" + spec +
                      "' (expected builtin:sinsin, builtin:const:C or builtin:poly:c00,...)");
}

std::vector<double> parse_alpha_grid(const std::string& spec) {
    auto toks = split(spec, ':');
    if (toks.size() != 3) throw ConfigError("--alpha expects A0:A1:STEP");
    double a0, a1, step;
    try {
        a0 = std::stod(toks[0]);
        a1 = std::stod(toks[1]);
        step = std::stod(toks[2]);
    } catch (const std::exception&) {
        throw ConfigError("bad number in --alpha grid");
    }
    if (!(a0 > 0.0) || a1 > 1.0 + 1e-12 || !(step > 0.0) || a1 < a0) {
        throw ConfigError("--alpha grid must satisfy 0 < A0 <= A1 <= 1, STEP > 0");
    }
    std::vector<double> grid;
    int k = static_cast<int>(std::floor((a1 - a0) / step + 1e-9));
    for (int i = 0; i <= k; ++i) grid.push_back(a0 + i * step);
    return grid;
}

std::vector<int> parse_int_list(const std::string& spec, const char* what) {
    std::vector<int> out;
    for (const std::string& t : split(spec, ',')) {
        try {
            out.push_back(std::stoi(t));
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad integer in ") + what);
        }
        if (out.back() < 1) throw ConfigError(std::string(what) + " entries must be >= 1");
    }
    if (out.empty()) throw ConfigError(std::string(what) + " must be nonempty");
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out.good()) throw ConfigError("cannot write '" + path + "'");
}

struct MeshGenArgs {
    int fk = 0;
    std::string out;
};

int cmd_mesh_gen(const MeshGenArgs& a) {
    Mesh mesh = generate_friedrichs_keller(a.fk);
    std::ostringstream ss;
    write_mesh(mesh, ss);
    write_file(a.out, ss.str());
    return 0;
}

struct ConstantsArgs {
    std::string j_list = "0,12,4,5";
    std::string alpha = "0.1:1.0:0.1";
    double theta = M_PI / 2.0;
    int n = 32;
    int poly_degree = 8;
    std::string out;
    std::string svg;
};

int cmd_constants(const ConstantsArgs& a) {
    std::vector<ConstantId> js;
    for (const std::string& tok : split(a.j_list, ',')) {
        auto id = parse_constant_id(tok);
        if (!id) throw ConfigError("unknown constant id '" + tok + "' in --J");
        js.push_back(*id);
    }
    std::vector<double> alphas = parse_alpha_grid(a.alpha);
    if (a.n < 2) throw ConfigError("--n must be >= 2");
    if (a.poly_degree < 2) throw ConfigError("--poly-degree must be >= 2");

    auto rows = constants_atlas(js, alphas, a.theta, a.n, a.poly_degree);

    std::ostringstream csv;
    write_atlas_csv(csv, rows);
    write_file(a.out, csv.str());

    for (const AtlasRow& r : rows) {
        if (!r.error.empty()) {
            std::cerr << "warning: C_" << to_string(r.estimate.id) << " at alpha="
                      << fmt17(r.estimate.alpha) << " failed: " << r.error << "\n";
        }
    }

    if (!a.svg.empty()) {
        tools::SvgPlot plot("error constants vs alpha", "alpha", "constant");
        auto curve = [&](ConstantId j, bool lower) {
            std::vector<double> xs, ys;
            for (const AtlasRow& r : rows) {
                if (r.estimate.id != j || !r.error.empty()) continue;
                double v = lower ? r.estimate.lower : r.estimate.upper;
                if (!std::isfinite(v)) continue;
                xs.push_back(r.estimate.alpha);
                ys.push_back(v);
            }
            return std::pair{xs, ys};
        };
        for (ConstantId j : js) {
            auto [lx, ly] = curve(j, true);
            if (!lx.empty()) plot.add_series("C_" + to_string(j) + " lower", lx, ly);
            auto [ux, uy] = curve(j, false);
            if (!ux.empty()) plot.add_series("C_" + to_string(j) + " upper", ux, uy);
        }
        // product curve matching the C_5 chain, when both factors are present
        bool has0 = std::count(js.begin(), js.end(), ConstantId::c0);
        bool has12 = std::count(js.begin(), js.end(), ConstantId::c12);
        if (has0 && has12) {
            auto [x0, y0] = curve(ConstantId::c0, true);
            auto [x12, y12] = curve(ConstantId::c12, true);
            if (x0.size() == x12.size() && !x0.empty()) {
                std::vector<double> prod(y0.size());
                for (size_t i = 0; i < y0.size(); ++i) prod[i] = y0[i] * y12[i];
                plot.add_series("C_0*C_12 lower", x0, prod);
            }
        }
        write_file(a.svg, plot.render());
    }
    return 0;
}

struct ConvergeArgs {
    std::string n_list = "4,8,16,32,64";
    std::string load = "builtin:sinsin";
    std::string out;
    std::string svg;
    bool no_svg = false;
};

int cmd_converge(const ConvergeArgs& a) {
    if (a.load != "builtin:sinsin") {
        throw ConfigError("converge requires --f builtin:sinsin (exact solution known)");
    }
    std::vector<int> ns = parse_int_list(a.n_list, "--N");
    CertifyOptions opts;
    auto reports = convergence_study(sinsin_load(), sinsin_exact(), ns, opts);

    std::ostringstream csv;
    write_report_csv(csv, reports, true);
    write_file(a.out, csv.str());

    if (!a.svg.empty() && !a.no_svg) {
        tools::SvgPlot plot("energy error and bounds vs h", "h", "error", true, true);
        std::vector<double> h, ee, be, bf, le, bl;
        for (const BoundReport& r : reports) {
            h.push_back(r.h_star);
            ee.push_back(r.true_energy_error.value_or(0.0));
            be.push_back(r.apriori_energy.value_or(0.0));
            bf.push_back(r.apost_flux);
            le.push_back(r.true_l2_error.value_or(0.0));
            bl.push_back(r.apriori_l2.value_or(0.0));
        }
        plot.add_series("energy error", h, ee);
        plot.add_series("a priori energy bound", h, be);
        plot.add_series("a posteriori flux bound", h, bf);
        plot.add_series("L2 error", h, le);
        plot.add_series("a priori L2 bound", h, bl);
        write_file(a.svg, plot.render());
    }
    return 0;
}

struct SolveArgs {
    std::string mesh_path;
    int fk = 0;
    std::string load = "builtin:sinsin";
    std::string out_prefix;
    bool convex = false;
    bool exact_on = false;
    bool exact_off = false;
};

int cmd_solve(const SolveArgs& a) {
    if ((a.fk > 0) == !a.mesh_path.empty()) {
        throw ConfigError("exactly one of --fk and --mesh is required");
    }
    std::optional<Mesh> mesh;
    if (a.fk > 0) {
        mesh.emplace(generate_friedrichs_keller(a.fk));
    } else {
        std::ifstream in(a.mesh_path);
        if (!in) throw ConfigError("cannot open mesh file '" + a.mesh_path + "'");
        mesh.emplace(read_mesh(in));
    }

    ScalarField f = parse_load(a.load);
    bool exact_known = a.fk > 0 && a.load == "builtin:sinsin";
    if (a.exact_on) exact_known = true;
    if (a.exact_off) exact_known = false;
    ScalarField exact = sinsin_exact();

    CertifyOptions opts;
    opts.convex = a.convex || a.fk > 0;

    RunResult r = certified_solve(*mesh, f, exact_known ? &exact : nullptr, opts);
    r.report.N = a.fk;

    if (r.gc.max_theta > 0.9 * M_PI) {
        std::cerr << "warning: maximum-angle condition is strained (largest angle "
                  << fmt17(r.gc.max_theta) << " rad); the C_6-driven bounds blow up as the "
                  << "angle approaches pi\n";
    }

    {
        std::ostringstream ss;
        write_cr_csv(ss, r.u_h);
        write_file(a.out_prefix + ".solution.csv", ss.str());
    }
    {
        std::ostringstream ss;
        write_flux_csv(ss, r.p, r.fbar);
        write_file(a.out_prefix + ".flux.csv", ss.str());
    }
    {
        std::ostringstream ss;
        write_report_csv(ss, {r.report}, false);
        write_file(a.out_prefix + ".report.csv", ss.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crouzeix-Raviart Poisson solver with computable error bounds"};
    app.require_subcommand(1);

    MeshGenArgs mg;
    CLI::App* mesh_gen = app.add_subcommand("mesh-gen", "generate a Friedrichs-Keller mesh");
    mesh_gen->add_option("--fk", mg.fk, "N for the N x N unit-square mesh")->required();
    mesh_gen->add_option("-o,--output", mg.out, "output mesh path")->required();

    ConstantsArgs ca;
    CLI::App* constants = app.add_subcommand("constants", "bracket error constants over alpha");
    constants->add_option("--J", ca.j_list, "comma list of constant ids (0,1,2,3,12,123,4,5,6)");
    constants->add_option("--alpha", ca.alpha, "grid A0:A1:STEP");
    constants->add_option("--theta", ca.theta, "triangle angle in radians");
    constants->add_option("--n", ca.n, "subdivision for eigenvalue lower bounds");
    constants->add_option("--poly-degree", ca.poly_degree, "polynomial degree for C_4/C_5");
    constants->add_option("-o,--output", ca.out, "output CSV path")->required();
    constants->add_option("--svg", ca.svg, "also write an SVG plot");

    ConvergeArgs cv;
    CLI::App* converge = app.add_subcommand("converge", "refinement study with certified bounds");
    converge->add_option("--N", cv.n_list, "comma list of mesh subdivisions");
    converge->add_option("--f", cv.load, "load (builtin:sinsin)");
    converge->add_option("-o,--output", cv.out, "output CSV path")->required();
    converge->add_option("--svg", cv.svg, "also write an SVG plot");
    converge->add_flag("--no-svg", cv.no_svg, "suppress SVG output");

    SolveArgs sv;
    CLI::App* solve = app.add_subcommand("solve", "single certified solve");
    solve->add_option("--mesh", sv.mesh_path, "mesh file path");
    solve->add_option("--fk", sv.fk, "N for a generated unit-square mesh");
    solve->add_option("--f", sv.load, "load spec (builtin:sinsin|builtin:const:C|builtin:poly:...)");
    solve->add_option("-o,--output", sv.out_prefix, "output path prefix")->required();
    solve->add_flag("--convex", sv.convex, "domain is convex: enables the a priori bounds");
    solve->add_flag("--exact", sv.exact_on, "treat the sinsin exact solution as valid");
    solve->add_flag("--no-exact", sv.exact_off, "disable exact-solution error reporting");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (mesh_gen->parsed()) return cmd_mesh_gen(mg);
        if (constants->parsed()) return cmd_constants(ca);
        if (converge->parsed()) return cmd_converge(cv);
        if (solve->parsed()) return cmd_solve(sv);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const femcert::MeshError& e) {
        std::cerr << "mesh error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const femcert::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
