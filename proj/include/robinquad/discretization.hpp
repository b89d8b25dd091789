#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "robinquad/form_coefficients.hpp"
#include "robinquad/mesh.hpp"

namespace robinquad {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

// Piecewise-linear element matrices on the reference mesh, split into the pieces that
// any FormCoefficients combine linearly. Built once per mesh.
struct ReferenceOperators {
    int dof_count = 0;
    // [half][0] = d1 d1, [half][1] = d1 d2 + d2 d1, [half][2] = d2 d2
    std::array<std::array<SparseMatrix, 3>, 2> grad;
    std::array<SparseMatrix, 4> edge;  // kEdges order
    std::array<SparseMatrix, 2> mass;

    SparseMatrix stiffness(const FormCoefficients& f) const;
    SparseMatrix mass_matrix(const FormCoefficients& f) const;
    // u^T K v and u^T M v without forming K or M
    double stiffness_form(const FormCoefficients& f, const Vector& u, const Vector& v) const;
    double mass_form(const FormCoefficients& f, const Vector& u, const Vector& v) const;
};

ReferenceOperators build_reference_operators(const Mesh& m);

struct AssembledSystem {
    SparseMatrix stiffness_plus_boundary;
    SparseMatrix mass;
    int dof_count = 0;
    std::vector<std::string> warnings;
};

// Robin form of the quadrilateral carried to the reference mesh (see Weighting).
AssembledSystem assemble_transformed(const QuadParams& p, double alpha, const Mesh& m);
AssembledSystem assemble_transformed(const QuadParams& p, double alpha, const Mesh& m,
                                     const ReferenceOperators& ops, Weighting w = Weighting::Transported);
// Plain Robin form assembled on the mesh pushed through map_forward(p).
AssembledSystem assemble_direct(const QuadParams& p, double alpha, const Mesh& m);

struct SolveOptions {
    std::optional<double> shift_hint;  // a value near lambda_1, e.g. from a coarser mesh
    double tolerance = 1e-13;          // relative change of the Rayleigh quotient
    int max_iterations = 500;
};

struct EigenPair {
    double lambda = 0.0;
    Vector vector;  // M-normalised, positive mean
    double residual = 0.0;       // ||(K - lambda M) v||_inf
    double stiffness_norm = 0.0; // ||K||_inf
    int iterations = 0;
    int factorizations = 0;
};

// Smallest generalised eigenvalue of (K, M) by inertia-guided shifted inverse iteration.
EigenPair solve_lowest(const AssembledSystem& sys, const SolveOptions& opt = {});

// Two-level solve: dense eigen-solve on a coarse mesh supplies the shift for the fine one.
EigenPair solve_quad(const QuadParams& p, double alpha, const Mesh& m, const SolveOptions& opt = {});

// Number of generalised eigenvalues strictly below sigma (LDL^T inertia of K - sigma M).
int count_below(const AssembledSystem& sys, double sigma);

// A value below the second eigenvalue: returns lambda_1 + gap estimate with the gap
// bracketed to relative accuracy 'rel'.
double second_eigenvalue_bracket(const AssembledSystem& sys, double lambda1, double rel = 1e-3);

double rayleigh(const AssembledSystem& sys, const Vector& v);

// Coordinate format "row col value" with a one-line header "rows cols nnz".
void write_coordinate(std::ostream& os, const SparseMatrix& a);

// Warning text when |alpha| is large and the mesh cannot resolve the boundary layer.
std::optional<std::string> boundary_layer_warning(double alpha, double S, double h);

}  // namespace robinquad
