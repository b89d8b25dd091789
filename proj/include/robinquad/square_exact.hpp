#pragma once

#include <array>

#include "robinquad/geometry.hpp"

namespace robinquad {

// First Robin eigenpair of the reference square |x| + |y| <= sqrt(S).
// With u = (x+y)/sqrt2, v = (y-x)/sqrt2 and L = sqrt(S/2) the eigenfunction is
//   N cosh(k u) cosh(k v)  (alpha < 0)   or   N cos(k u) cos(k v)  (alpha > 0),  k = t_star / L.
struct SquareSolution {
    double alpha = 0.0;
    double S = 1.0;
    double L = 0.0;
    double t_star = 0.0;
    double lambda1 = 0.0;
    double norm_const = 0.0;
    double boundary_norm_sq = 0.0;
    double grad_norm_sq = 0.0;

    double kappa() const { return t_star / L; }
};

// t >= 0 with t tanh t = x.
double g_inverse(double x);
// t in (0, pi/2) with t tan t = x.
double f_inverse(double x);

SquareSolution solve_square(double alpha, double S);

double eval_eigenfunction(const SquareSolution& sol, double x, double y);
Vec2 eval_gradient(const SquareSolution& sol, double x, double y);

// Norms of the eigenfunction split along y = 0 and over the four edges,
// evaluated by Gauss-Legendre quadrature.
struct SquareSplitNorms {
    // index 0 = upper half (y >= 0), 1 = lower half
    std::array<double, 2> value_sq{};
    std::array<double, 2> dx_sq{};
    std::array<double, 2> dy_sq{};
    std::array<double, 2> dx_dy{};
    std::array<double, 4> edge_sq{};  // kEdges order
};
SquareSplitNorms square_split_norms(const SquareSolution& sol, int points = 32);

// grad_norm_sq + alpha C boundary_norm_sq for the square eigenfunction at alpha.
double zeta(double alpha, double C, double S);

// d lambda1 / d alpha as the boundary norm.
double dlambda_dalpha(const SquareSolution& sol);
// The same derivative from differentiating the transcendental equation.
double dlambda_dalpha_chain(const SquareSolution& sol);

}  // namespace robinquad
