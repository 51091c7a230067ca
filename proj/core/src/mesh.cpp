#include "femcert/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

namespace femcert {

TriangleShape classify_shape(const std::array<Point2, 3>& tri) {
    struct EdgeCand {
        double length;
        std::array<int, 2> pair; // sorted local indices
        int a, b;                // endpoints as given
    };
    std::array<EdgeCand, 3> cand;
    int k = 0;
    for (auto [a, b] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{2, 0}}) {
        cand[k++] = {norm(tri[b] - tri[a]), {std::min(a, b), std::max(a, b)}, a, b};
    }
    std::sort(cand.begin(), cand.end(), [](const EdgeCand& l, const EdgeCand& r) {
        return std::tie(l.length, l.pair) < std::tie(r.length, r.pair);
    });

    const double longest = cand[2].length;
    const double area = std::abs(signed_area(tri[0], tri[1], tri[2]));
    if (!(area > kDegenerateAreaFactor * longest * longest)) {
        throw MeshError("classify_shape: degenerate triangle (area below threshold)");
    }

    // theta is the angle between the shortest and the medium edge, i.e. at
    // their shared vertex (the vertex opposite the longest edge).
    int shared = -1;
    for (int i : cand[0].pair) {
        if (i == cand[1].pair[0] || i == cand[1].pair[1]) shared = i;
    }
    int other0 = cand[0].pair[0] == shared ? cand[0].pair[1] : cand[0].pair[0];
    int other1 = cand[1].pair[0] == shared ? cand[1].pair[1] : cand[1].pair[0];
    Vec2 u = tri[other0] - tri[shared];
    Vec2 w = tri[other1] - tri[shared];
    double c = dot(u, w) / (cand[0].length * cand[1].length);
    c = std::clamp(c, -1.0, 1.0);

    TriangleShape s;
    s.h = cand[1].length;
    s.alpha = cand[0].length / cand[1].length;
    s.theta = std::acos(c);
    return s;
}

namespace {

std::vector<MeshEdge> build_edges(const std::vector<Point2>& vertices,
                                  const std::vector<std::array<int, 3>>& triangles,
                                  std::vector<std::array<int, 3>>& tri_edges) {
    std::map<std::array<int, 2>, int> index_of;
    for (const auto& tr : triangles) {
        for (int i = 0; i < 3; ++i) {
            int a = tr[(i + 1) % 3], b = tr[(i + 2) % 3];
            index_of.try_emplace({std::min(a, b), std::max(a, b)}, 0);
        }
    }
    std::vector<MeshEdge> edges;
    edges.reserve(index_of.size());
    for (auto& [key, idx] : index_of) {
        idx = static_cast<int>(edges.size());
        MeshEdge e;
        e.v = key;
        edges.push_back(e);
    }

    tri_edges.assign(triangles.size(), {-1, -1, -1});
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
        const auto& tr = triangles[t];
        for (int i = 0; i < 3; ++i) {
            int a = tr[(i + 1) % 3], b = tr[(i + 2) % 3];
            int e = index_of.at({std::min(a, b), std::max(a, b)});
            tri_edges[t][i] = e;
            MeshEdge& me = edges[e];
            if (me.tri[0] < 0) {
                me.tri[0] = t;
            } else if (me.tri[1] < 0) {
                me.tri[1] = t;
            } else {
                throw MeshError("mesh: edge shared by more than two triangles");
            }
        }
    }

    for (MeshEdge& e : edges) {
        if (e.tri[1] >= 0 && e.tri[0] > e.tri[1]) std::swap(e.tri[0], e.tri[1]);
        e.boundary = e.tri[1] < 0;
        Point2 pa = vertices[e.v[0]], pb = vertices[e.v[1]];
        e.midpoint = 0.5 * (pa + pb);
        e.length = norm(pb - pa);
        Vec2 n = rot90(pb - pa) / e.length;
        // Orient away from tri[0]; on the boundary this is the outward normal.
        const auto& tr = triangles[e.tri[0]];
        Point2 g = triangle_centroid({vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]});
        if (dot(n, e.midpoint - g) < 0.0) n = {-n.x1, -n.x2};
        e.normal = n;
    }
    return edges;
}

} // namespace

Mesh::Mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    const int nv = n_vertices();
    areas_.reserve(triangles_.size());
    shapes_.reserve(triangles_.size());
    for (int t = 0; t < n_triangles(); ++t) {
        const auto& tr = triangles_[t];
        for (int idx : tr) {
            if (idx < 0 || idx >= nv) throw MeshError("mesh: triangle vertex index out of range");
        }
        if (tr[0] == tr[1] || tr[1] == tr[2] || tr[0] == tr[2]) {
            throw MeshError("mesh: triangle with repeated vertex");
        }
        double a = signed_area(vertices_[tr[0]], vertices_[tr[1]], vertices_[tr[2]]);
        if (!(a > 0.0)) {
            throw MeshError("mesh: triangle " + std::to_string(t) +
                            " is not counter-clockwise (signed area <= 0)");
        }
        areas_.push_back(a);
        shapes_.push_back(classify_shape(triangle_points(t)));
    }
    edges_ = build_edges(vertices_, triangles_, tri_edges_);
    boundary_vertex_.assign(vertices_.size(), false);
    for (const MeshEdge& e : edges_) {
        if (e.boundary) {
            boundary_vertex_[e.v[0]] = true;
            boundary_vertex_[e.v[1]] = true;
        }
    }
}

double Mesh::max_h() const {
    double h = 0.0;
    for (const TriangleShape& s : shapes_) h = std::max(h, s.h);
    return h;
}

double Mesh::total_area() const {
    double a = 0.0;
    for (double t : areas_) a += t;
    return a;
}

Mesh generate_friedrichs_keller(int N) {
    if (N < 1) throw MeshError("generate_friedrichs_keller: N must be >= 1");
    std::vector<Point2> vertices;
    vertices.reserve(static_cast<size_t>(N + 1) * (N + 1));
    for (int j = 0; j <= N; ++j) {
        for (int i = 0; i <= N; ++i) {
            vertices.push_back({static_cast<double>(i) / N, static_cast<double>(j) / N});
        }
    }
    auto vid = [N](int i, int j) { return j * (N + 1) + i; };
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(2 * static_cast<size_t>(N) * N);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

Mesh generate_reference_triangle_mesh(double alpha, double theta, int n, double h) {
    TriangleShape s{alpha, theta, h};
    if (!s.in_range()) {
        throw MeshError("generate_reference_triangle_mesh: shape parameters out of range");
    }
    if (n < 1) throw MeshError("generate_reference_triangle_mesh: n must be >= 1");

    const Vec2 A{h, 0.0};
    const Vec2 B{alpha * h * std::cos(theta), alpha * h * std::sin(theta)};

    // Lattice points P_{i,j} = (i/n) A + (j/n) B for i + j <= n.
    std::vector<Point2> vertices;
    std::vector<int> offset(n + 2, 0);
    for (int j = 0; j <= n; ++j) {
        offset[j + 1] = offset[j] + (n - j + 1);
        for (int i = 0; i <= n - j; ++i) {
            vertices.push_back((static_cast<double>(i) / n) * A + (static_cast<double>(j) / n) * B);
        }
    }
    auto vid = [&offset](int i, int j) { return offset[j] + i; };

    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i + j < n; ++i) {
            triangles.push_back({vid(i, j), vid(i + 1, j), vid(i, j + 1)});
            if (i + j < n - 1) {
                triangles.push_back({vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
            }
        }
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

namespace {

std::string next_content_line(std::istream& in, int& line_no) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        return line;
    }
    return {};
}

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
    throw MeshError("mesh parse error at line " + std::to_string(line_no) + ": " + what);
}

} // namespace

Mesh read_mesh(std::istream& in) {
    int line_no = 0;
    std::string header = next_content_line(in, line_no);
    while (!header.empty() && (header.back() == '\r' || header.back() == ' ')) header.pop_back();
    if (header != "ncmesh v1") parse_fail(line_no, "expected header 'ncmesh v1'");

    std::string counts = next_content_line(in, line_no);
    long long nv = -1, nt = -1;
    {
        std::istringstream ss(counts);
        if (!(ss >> nv >> nt) || nv < 0 || nt < 0) parse_fail(line_no, "expected '<nv> <nt>'");
        std::string rest;
        if (ss >> rest) parse_fail(line_no, "trailing tokens after counts");
        if (nv > 100'000'000 || nt > 100'000'000) parse_fail(line_no, "counts out of range");
    }

    std::vector<Point2> vertices;
    vertices.reserve(static_cast<size_t>(nv));
    for (long long i = 0; i < nv; ++i) {
        std::istringstream ss(next_content_line(in, line_no));
        Point2 p;
        if (!(ss >> p.x1 >> p.x2)) parse_fail(line_no, "expected two vertex coordinates");
        if (!std::isfinite(p.x1) || !std::isfinite(p.x2)) parse_fail(line_no, "non-finite coordinate");
        vertices.push_back(p);
    }

    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(static_cast<size_t>(nt));
    for (long long t = 0; t < nt; ++t) {
        std::istringstream ss(next_content_line(in, line_no));
        long long i, j, k;
        if (!(ss >> i >> j >> k)) parse_fail(line_no, "expected three vertex indices");
        for (long long idx : {i, j, k}) {
            if (idx < 0 || idx >= nv) parse_fail(line_no, "vertex index out of range");
        }
        double a = signed_area(vertices[i], vertices[j], vertices[k]);
        if (!(a > 0.0)) parse_fail(line_no, "triangle is not counter-clockwise");
        triangles.push_back({static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)});
    }

    std::string tail;
    while (std::getline(in, tail)) {
        ++line_no;
        if (tail.find_first_not_of(" \t\r") != std::string::npos) {
            parse_fail(line_no, "unexpected trailing content");
        }
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
    out << "ncmesh v1\n" << mesh.n_vertices() << ' ' << mesh.n_triangles() << '\n';
    char buf[64];
    for (int i = 0; i < mesh.n_vertices(); ++i) {
        const Point2& p = mesh.vertex(i);
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x1, p.x2);
        out << buf;
    }
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangle(t);
        out << tr[0] << ' ' << tr[1] << ' ' << tr[2] << '\n';
    }
}

} // namespace femcert
