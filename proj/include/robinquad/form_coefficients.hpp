#pragma once

#include <array>

#include "robinquad/geometry.hpp"

namespace robinquad {

// Coefficients of a pair of forms on functions over the reference square:
//   stiffness: sum_j int_{half j} grad(f)^T interior[j] grad(g) + sum_e boundary[e] int_{Gamma0 e} f g
//   mass:      sum_j mass[j] int_{half j} f g
// Index j = 0 is the upper half, 1 the lower; e follows kEdges. Boundary weights include alpha.
struct FormCoefficients {
    std::array<Mat2, 2> interior{Mat2::Zero(), Mat2::Zero()};
    std::array<double, 4> boundary{};
    std::array<double, 2> mass{};
};

// How functions on the quadrilateral are carried to the reference square.
//   Transported: f = u o L. The mass picks up the Jacobian S_j/S on each half, so the
//                reference problem has exactly the spectrum of the Robin problem on the quad.
//   Pullback:    the matrix-coefficient form with the plain L2 mass on the reference square,
//                i.e. the Jacobian weights divided out of stiffness and boundary terms.
enum class Weighting { Transported, Pullback };

// Value, gradient and Hessian of every coefficient in (a1, a2, c, S1), closed form.
struct FormDerivativeCoefficients {
    FormCoefficients value;
    std::array<FormCoefficients, 4> first;                  // indexed by Param
    std::array<std::array<FormCoefficients, 4>, 4> second;  // symmetric
};

FormDerivativeCoefficients form_derivative_coefficients(const QuadParams& p, double alpha,
                                                        Weighting w = Weighting::Transported);

FormCoefficients form_coefficients(const QuadParams& p, double alpha, Weighting w = Weighting::Transported);

// Interior matrix of the pullback form on half j (1 = upper, 2 = lower):
// (D L^-1)(D L^-1)^T with the rows of the inverse map.
Mat2 pullback_metric(const QuadParams& p, int j);

}  // namespace robinquad
