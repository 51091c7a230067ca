#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Sparse>

#include "femcert/field.hpp"
#include "femcert/mesh.hpp"

namespace femcert {

enum class SpaceTag { cr_edge, conforming_vertex, piecewise_constant };

// Maps geometric entities (edges for CR, vertices for conforming P1) to
// reduced equation numbers; entities on the Dirichlet boundary are masked.
struct DofMap {
    SpaceTag space = SpaceTag::cr_edge;
    std::vector<bool> dirichlet;     // per entity
    std::vector<int> reduced_index;  // -1 where masked
    std::vector<int> entity_of;      // reduced index -> entity

    int n_entities() const { return static_cast<int>(dirichlet.size()); }
    int n_reduced() const { return static_cast<int>(entity_of.size()); }
};

DofMap make_cr_dofmap(const Mesh& mesh);
DofMap make_conforming_dofmap(const Mesh& mesh);

// Non-conforming P1 solution: one coefficient per edge, equal to the value
// at the edge midpoint (= the mean of the trace along the edge).
struct CrSolution {
    const Mesh* mesh = nullptr;
    std::vector<double> edge_value;
};

struct ConformingSolution {
    const Mesh* mesh = nullptr;
    std::vector<double> vertex_value;
};

// One value per triangle (space of step functions).
struct PwConstant {
    std::vector<double> value;
};

struct AssembledSystem {
    Eigen::SparseMatrix<double> stiffness; // full, unmasked; symmetric, row sums 0
    DofMap dofmap;
};

AssembledSystem assemble_cr(const Mesh& mesh);
AssembledSystem assemble_conforming(const Mesh& mesh);

// Exact P1 mass matrix (no masking).
Eigen::SparseMatrix<double> assemble_conforming_mass(const Mesh& mesh);

// Load vectors against the full (unmasked) basis. The ScalarField versions
// use the 7-point degree-5 rule; the PwConstant versions are exact.
Eigen::VectorXd assemble_cr_load(const Mesh& mesh, const ScalarField& f);
Eigen::VectorXd assemble_cr_load(const Mesh& mesh, const PwConstant& fbar);
Eigen::VectorXd assemble_conforming_load(const Mesh& mesh, const ScalarField& f);
Eigen::VectorXd assemble_conforming_load(const Mesh& mesh, const PwConstant& fbar);

struct SolveOptions {
    // Direct sparse Cholesky up to this many reduced unknowns, then
    // Jacobi-preconditioned CG.
    int direct_dof_limit = 200000;
    double cg_tol = 1e-12;
    double residual_tol = 1e-10; // post-solve check, relative
};

// Solves the masked SPD system and scatters back to a full-size vector with
// exact zeros on masked entities. Throws NumericalError on failure.
Eigen::VectorXd solve_reduced(const AssembledSystem& system, const Eigen::VectorXd& full_load,
                              const SolveOptions& opts = {});

CrSolution solve_poisson_cr(const Mesh& mesh, const ScalarField& f, const SolveOptions& opts = {});
ConformingSolution solve_poisson_conforming(const Mesh& mesh, const ScalarField& f,
                                            const SolveOptions& opts = {});
ConformingSolution solve_poisson_conforming(const Mesh& mesh, const PwConstant& fbar,
                                            const SolveOptions& opts = {});

// Orthogonal projection onto piecewise constants: per-triangle mean of f.
PwConstant project_mean(const Mesh& mesh, const ScalarField& f);

// Edge-mean interpolation onto the CR space: the coefficient of every edge
// is the mean of v along that edge (5-point Gauss).
CrSolution interpolate_cr(const Mesh& mesh, const ScalarField& v);

// Element-local evaluation of the piecewise-linear fields.
Vec2 cr_gradient(const CrSolution& u, int t);
double cr_value(const CrSolution& u, int t, Point2 x);
Vec2 conforming_gradient(const ConformingSolution& u, int t);
double conforming_value(const ConformingSolution& u, int t, Point2 x);

// Broken energy norm ||grad u_exact - grad_h u_h|| (degree-5 rule); the exact
// field must provide a gradient.
double energy_error(const Mesh& mesh, const CrSolution& u, const ScalarField& exact);
double energy_error(const Mesh& mesh, const ConformingSolution& u, const ScalarField& exact);
double l2_error(const Mesh& mesh, const CrSolution& u, const ScalarField& exact);
double l2_error(const Mesh& mesh, const ConformingSolution& u, const ScalarField& exact);

// CSV dumps: edge_index,midpoint_x1,midpoint_x2,value and
// vertex_index,x1,x2,value respectively.
void write_cr_csv(std::ostream& out, const CrSolution& u);
void write_conforming_csv(std::ostream& out, const ConformingSolution& u);

} // namespace femcert
