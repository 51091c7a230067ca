#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "femcert/mesh.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = "cli_tmp";

int run_cli(const std::string& args, const fs::path& stdout_to = {},
            const fs::path& stderr_to = {}) {
    std::string cmd = std::string(FEMCERT_CLI_PATH) + " " + args;
    if (!stdout_to.empty()) cmd += " > " + stdout_to.string();
    if (!stderr_to.empty()) cmd += " 2> " + stderr_to.string();
    int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
    if (WIFEXITED(status)) return WEXITSTATUS(status);
#endif
    return status;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        rows.push_back(cells);
    }
    return rows;
}

// cell-by-cell comparison: equal strings, or both numeric within tolerance
void check_csv_matches(const std::string& got, const std::string& want, double tol) {
    auto g = parse_csv(got), w = parse_csv(want);
    REQUIRE(g.size() == w.size());
    for (size_t r = 0; r < g.size(); ++r) {
        REQUIRE(g[r].size() == w[r].size());
        for (size_t c = 0; c < g[r].size(); ++c) {
            if (g[r][c] == w[r][c]) continue;
            char* gend = nullptr;
            char* wend = nullptr;
            double gv = std::strtod(g[r][c].c_str(), &gend);
            double wv = std::strtod(w[r][c].c_str(), &wend);
            REQUIRE(gend != g[r][c].c_str());
            REQUIRE(wend != w[r][c].c_str());
            CHECK(std::abs(gv - wv) <= tol * std::max(1.0, std::abs(wv)));
        }
    }
}

struct TmpDir {
    TmpDir() {
        fs::remove_all(kTmp);
        fs::create_directories(kTmp);
    }
};
TmpDir tmp_guard;

} // namespace

TEST_CASE("mesh-gen writes valid meshes") {
    fs::path out = kTmp / "fk4.mesh";
    REQUIRE(run_cli("mesh-gen --fk 4 -o " + out.string()) == 0);
    std::ifstream in(out);
    femcert::Mesh m = femcert::read_mesh(in);
    CHECK(m.n_vertices() == 25);
    CHECK(m.n_triangles() == 32);

    fs::path out1 = kTmp / "fk1.mesh";
    REQUIRE(run_cli("mesh-gen --fk 1 -o " + out1.string()) == 0);
    std::ifstream in1(out1);
    CHECK(femcert::read_mesh(in1).n_triangles() == 2);

    // round trip against the in-process generator
    femcert::Mesh direct = femcert::generate_friedrichs_keller(4);
    std::ostringstream expect;
    femcert::write_mesh(direct, expect);
    CHECK(slurp(out) == expect.str());
}

TEST_CASE("converge: deterministic csv with guaranteed bounds") {
    fs::path a = kTmp / "conv_a.csv";
    fs::path b = kTmp / "conv_b.csv";
    REQUIRE(run_cli("converge --N 2,4,8 --f builtin:sinsin --no-svg -o " + a.string()) == 0);
    REQUIRE(run_cli("converge --N 2,4,8 --f builtin:sinsin --no-svg -o " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b)); // byte-identical across runs

    auto rows = parse_csv(slurp(a));
    REQUIRE(rows.size() == 4); // header + 3 data rows (footer is a comment)
    CHECK(rows[0][0] == "N");
    REQUIRE(rows[0].size() == 10);
    for (size_t r = 1; r < rows.size(); ++r) {
        REQUIRE(rows[r].size() == 10);
        double energy_err = std::stod(rows[r][2]);
        double apriori = std::stod(rows[r][4]);
        double apost = std::stod(rows[r][6]);
        double flux_mid = std::stod(rows[r][7]);
        CHECK(apriori >= energy_err);
        CHECK(flux_mid <= apost);
    }
    CHECK(slurp(a).find("# slope_energy=") != std::string::npos);
}

TEST_CASE("thread cap does not change the output") {
    fs::path a = kTmp / "thr_a.csv";
    fs::path b = kTmp / "thr_b.csv";
    std::string base = "converge --N 2,4 --f builtin:sinsin --no-svg -o ";
    REQUIRE(std::system(("FEMCERT_THREADS=1 " + std::string(FEMCERT_CLI_PATH) + " " + base +
                         a.string()).c_str()) == 0);
    REQUIRE(std::system(("FEMCERT_THREADS=4 " + std::string(FEMCERT_CLI_PATH) + " " + base +
                         b.string()).c_str()) == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("converge rejects non-sinsin loads") {
    CHECK(run_cli("converge --N 2 --f builtin:const:1 -o " + (kTmp / "x.csv").string(),
                  kTmp / "o.txt", kTmp / "e.txt") == 2);
}

TEST_CASE("constants subcommand emits the atlas") {
    fs::path out = kTmp / "atlas.csv";
    fs::path svg = kTmp / "atlas.svg";
    REQUIRE(run_cli("constants --J 0,4 --alpha 0.5:1.0:0.25 --n 8 --poly-degree 4 -o " +
                    out.string() + " --svg " + svg.string()) == 0);
    auto rows = parse_csv(slurp(out));
    REQUIRE(rows.size() == 7); // header + 2 ids x 3 alphas
    CHECK(rows[0][0] == "J");
    std::string svg_text = slurp(svg);
    CHECK(svg_text.find("<svg") != std::string::npos);
    CHECK(svg_text.find("polyline") != std::string::npos);

    CHECK(run_cli("constants --J bogus -o " + (kTmp / "y.csv").string(), kTmp / "o.txt",
                  kTmp / "e.txt") == 2);
}

TEST_CASE("solve produces solution, flux and report files") {
    fs::path prefix = kTmp / "run";
    REQUIRE(run_cli("solve --fk 2 --f builtin:sinsin -o " + prefix.string()) == 0);

    std::string solution = slurp(prefix.string() + ".solution.csv");
    std::string flux = slurp(prefix.string() + ".flux.csv");
    std::string report = slurp(prefix.string() + ".report.csv");
    CHECK(solution.rfind("edge_index,", 0) == 0);
    CHECK(flux.rfind("tri_index,", 0) == 0);
    CHECK(report.rfind("N,h,", 0) == 0);
    CHECK(parse_csv(solution).size() == 1 + 16); // header + one row per edge
    CHECK(parse_csv(flux).size() == 1 + 8);

    auto rep = parse_csv(report);
    REQUIRE(rep.size() == 2);
    for (size_t c = 0; c < rep[1].size(); ++c) CHECK(!rep[1][c].empty());

    // golden comparison (numeric, tolerant to last-ulp formatting)
    check_csv_matches(solution, slurp(fs::path(FEMCERT_GOLDEN_DIR) / "fk2_solution.csv"), 1e-10);
    check_csv_matches(flux, slurp(fs::path(FEMCERT_GOLDEN_DIR) / "fk2_flux.csv"), 1e-10);
    check_csv_matches(report, slurp(fs::path(FEMCERT_GOLDEN_DIR) / "fk2_report.csv"), 1e-10);
}

TEST_CASE("solve with constant load on fk mesh reports zero-oscillation bounds") {
    fs::path prefix = kTmp / "constload";
    REQUIRE(run_cli("solve --fk 2 --f builtin:const:0 -o " + prefix.string()) == 0);
    auto rep = parse_csv(slurp(prefix.string() + ".report.csv"));
    REQUIRE(rep.size() == 2);
    // zero load: all bounds vanish, true errors are unknown (no exact metadata)
    CHECK(std::stod(rep[1][4]) == 0.0);
    CHECK(std::stod(rep[1][6]) == 0.0);
    CHECK(rep[1][2].empty());
}

TEST_CASE("exact flag enables error reporting on file meshes") {
    fs::path meshfile = kTmp / "fk2_file.mesh";
    REQUIRE(run_cli("mesh-gen --fk 2 -o " + meshfile.string()) == 0);

    // same mesh from a file: true errors appear only with --exact
    fs::path p1 = kTmp / "file_noexact";
    REQUIRE(run_cli("solve --mesh " + meshfile.string() + " --f builtin:sinsin --convex -o " +
                    p1.string()) == 0);
    auto r1 = parse_csv(slurp(p1.string() + ".report.csv"));
    CHECK(r1[1][2].empty());

    fs::path p2 = kTmp / "file_exact";
    REQUIRE(run_cli("solve --mesh " + meshfile.string() +
                    " --f builtin:sinsin --convex --exact -o " + p2.string()) == 0);
    auto r2 = parse_csv(slurp(p2.string() + ".report.csv"));
    CHECK(!r2[1][2].empty());

    // and the numbers match the generated-mesh run
    fs::path p3 = kTmp / "fk_direct";
    REQUIRE(run_cli("solve --fk 2 --f builtin:sinsin -o " + p3.string()) == 0);
    auto r3 = parse_csv(slurp(p3.string() + ".report.csv"));
    CHECK(std::stod(r2[1][2]) == doctest::Approx(std::stod(r3[1][2])).epsilon(1e-12));
}

TEST_CASE("solve flags strained maximum angles on external meshes") {
    // theta ~ 2.95 rad between the shortest and medium edges
    fs::path meshfile = kTmp / "reflex.mesh";
    {
        std::ofstream out(meshfile);
        out << "ncmesh v1\n3 1\n";
        out << "0 0\n1 0\n" << 0.8 * std::cos(2.95) << ' ' << 0.8 * std::sin(2.95) << "\n";
        out << "0 1 2\n";
    }
    fs::path err = kTmp / "reflex_err.txt";
    REQUIRE(run_cli("solve --mesh " + meshfile.string() + " --f builtin:const:1 -o " +
                    (kTmp / "reflex").string(), kTmp / "reflex_out.txt", err) == 0);
    CHECK(slurp(err).find("maximum-angle") != std::string::npos);

    // external mesh without --convex: a priori columns are empty
    auto rep = parse_csv(slurp((kTmp / "reflex").string() + ".report.csv"));
    REQUIRE(rep.size() == 2);
    CHECK(rep[1][4].empty());
    CHECK(rep[1][5].empty());
}

TEST_CASE("config and i/o failures exit with code 2") {
    CHECK(run_cli("bogus-subcommand", kTmp / "o.txt", kTmp / "e.txt") == 2);
    CHECK(run_cli("solve --f builtin:sinsin -o " + (kTmp / "z").string(), kTmp / "o.txt",
                  kTmp / "e.txt") == 2); // neither --fk nor --mesh
    CHECK(run_cli("solve --mesh does_not_exist.mesh --f builtin:sinsin -o " +
                  (kTmp / "z").string(), kTmp / "o.txt", kTmp / "e.txt") == 2);

    fs::path bad = kTmp / "bad.mesh";
    {
        std::ofstream out(bad);
        out << "ncmesh v1\n3 1\n0 0\n1 0\n0 1\n0 2 1\n"; // clockwise triangle
    }
    CHECK(run_cli("solve --mesh " + bad.string() + " --f builtin:sinsin -o " +
                  (kTmp / "z").string(), kTmp / "o.txt", kTmp / "e.txt") == 2);

    CHECK(run_cli("mesh-gen --fk 2 -o /nonexistent_dir_xyz/out.mesh", kTmp / "o.txt",
                  kTmp / "e.txt") == 2);
}
