#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "femcert/errors.hpp"
#include "femcert/geometry.hpp"

namespace femcert {

struct MeshEdge {
    std::array<int, 2> v{-1, -1};   // vertex indices, v[0] < v[1]
    std::array<int, 2> tri{-1, -1}; // adjacent triangles, tri[0] < tri[1]; tri[1] = -1 on boundary
    Point2 midpoint;
    Vec2 normal;                    // unit normal; points away from tri[0], outward on the boundary
    double length = 0.0;
    bool boundary = false;
};

// Immutable triangulation. Triangles are stored counter-clockwise; edges,
// midpoints, adjacency and per-triangle shape parameters are derived at
// construction. Edges are numbered in lexicographic order of their sorted
// vertex-index pairs, which makes all downstream output deterministic.
class Mesh {
public:
    Mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles);

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_triangles() const { return static_cast<int>(triangles_.size()); }
    int n_edges() const { return static_cast<int>(edges_.size()); }

    const Point2& vertex(int i) const { return vertices_[i]; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    const MeshEdge& edge(int e) const { return edges_[e]; }

    // Edge opposite local vertex i of triangle t.
    const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }

    std::array<Point2, 3> triangle_points(int t) const {
        const auto& tr = triangles_[t];
        return {vertices_[tr[0]], vertices_[tr[1]], vertices_[tr[2]]};
    }

    double area(int t) const { return areas_[t]; }
    Point2 centroid(int t) const { return triangle_centroid(triangle_points(t)); }
    const TriangleShape& shape(int t) const { return shapes_[t]; }

    bool vertex_on_boundary(int v) const { return boundary_vertex_[v]; }

    // Largest medium-edge length h_K over all triangles (the mesh parameter h*).
    double max_h() const;
    double total_area() const;
    int euler_characteristic() const { return n_vertices() - n_edges() + n_triangles(); }

private:
    std::vector<Point2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<MeshEdge> edges_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<double> areas_;
    std::vector<TriangleShape> shapes_;
    std::vector<bool> boundary_vertex_;
};

// N x N uniform triangulation of the unit square with all diagonals in the
// same direction; (N+1)^2 vertices, 2N^2 right isosceles triangles of leg 1/N.
Mesh generate_friedrichs_keller(int N);

// Reference triangle with vertices O(0,0), A(h,0), B(alpha*h*cos(theta),
// alpha*h*sin(theta)), uniformly subdivided into n^2 congruent copies.
// Throws MeshError if (alpha, theta) violates the admissible shape range.
Mesh generate_reference_triangle_mesh(double alpha, double theta, int n, double h = 1.0);

// Plain-text mesh format:
//   line 1:       ncmesh v1
//   line 2:       <nv> <nt>
//   next nv lines: <x1> <x2>
//   next nt lines: <i> <j> <k>   (0-based vertex indices, CCW)
// read_mesh throws MeshError naming the offending line; clockwise triangles
// are rejected, not repaired.
Mesh read_mesh(std::istream& in);
void write_mesh(const Mesh& mesh, std::ostream& out);

} // namespace femcert
