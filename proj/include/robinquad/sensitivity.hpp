#pragma once

#include <array>
#include <memory>
#include <string>

#include "robinquad/discretization.hpp"
#include "robinquad/square_exact.hpp"

namespace robinquad {

enum class Method { ClosedForm, DiscreteFormula, FiniteDifference };
const char* method_name(Method m);
Method method_from_name(const std::string& s);

using Vector4 = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;

struct SensitivityReport {
    QuadParams params;
    double alpha = 0.0;
    int mesh_level = 0;
    double lambda = 0.0;
    Vector4 gradient = Vector4::Zero();
    Matrix4 hessian = Matrix4::Zero();
    std::array<Method, 4> gradient_method{};
    std::array<std::array<Method, 4>, 4> hessian_method{};
};

// Everything derivative evaluations at one p share: mesh operators, the solved lowest
// eigenpair and the coefficient derivatives. Immutable once built.
class SensitivityContext {
public:
    SensitivityContext(const QuadParams& p, double alpha, const Mesh& m, const SolveOptions& opt = {});

    const QuadParams& params() const { return p_; }
    double alpha() const { return alpha_; }
    const Mesh& mesh() const { return *mesh_; }
    const ReferenceOperators& operators() const { return ops_; }
    const AssembledSystem& system() const { return sys_; }
    const EigenPair& eigenpair() const { return eig_; }
    const FormDerivativeCoefficients& coefficients() const { return coef_; }

    // d lambda / d v = phi^T (K^v - lambda M^v) phi
    double first_derivative(Param v) const;
    Vector4 gradient() const;

    // Solves the bordered system for d phi / d v (all four directions share one
    // factorisation). Throws ConditioningError when lambda_2 - lambda_1 is tiny.
    const std::array<Vector, 4>& eigenvector_derivatives() const;
    const Vector& eigenvector_derivative(Param v) const { return eigenvector_derivatives()[static_cast<int>(v)]; }
    // Largest relative residual of the bordered solves.
    double eigenvector_derivative_residual() const;
    double spectral_gap() const;

    double second_derivative(Param v1, Param v2) const;
    Matrix4 hessian() const;

    // G[f, g] = f^T (K - lambda M) g, positive semidefinite on the discrete space.
    double g_form(const Vector& f, const Vector& g) const;
    // phi^T K^{v1 v2} phi - lambda phi^T M^{v1 v2} phi: the part of the second derivative
    // that only involves the eigenvector itself.
    double pure_form_part(Param v1, Param v2) const;

private:
    QuadParams p_;
    double alpha_;
    std::shared_ptr<const Mesh> mesh_;
    ReferenceOperators ops_;
    AssembledSystem sys_;
    EigenPair eig_;
    FormDerivativeCoefficients coef_;

    mutable bool have_derivs_ = false;
    mutable std::array<Vector, 4> derivs_;
    mutable double deriv_residual_ = 0.0;
    mutable double gap_ = -1.0;
};

double first_derivative(const QuadParams& p, double alpha, Param v, const Mesh& m);
Vector eigenvector_derivative(const QuadParams& p, double alpha, Param v, const Mesh& m);
double second_derivative(const QuadParams& p, double alpha, Param v1, Param v2, const Mesh& m);

// Full report with every entry from the discrete derivative formulas.
SensitivityReport discrete_report(const QuadParams& p, double alpha, const Mesh& m);

struct FiniteDifferenceOptions {
    double first_step = 1e-4;   // times max(1, |v|)
    double second_step = 5e-3;  // times max(1, |v|)
};
// Central differences of the discrete eigenvalue on mesh m.
SensitivityReport finite_difference_report(const QuadParams& p, double alpha, const Mesh& m,
                                           const FiniteDifferenceOptions& opt = {});
double finite_difference_first(const QuadParams& p, double alpha, Param v, const Mesh& m, double step,
                               double lambda_hint);

// The closed-form pure parts of the Hessian at the square for the transported problem
// (diagonal entries a1, a2, c, S1), from the exact square norms.
Vector4 square_pure_parts(double alpha, double S);
// The same for the pullback form with the plain L2 mass.
Vector4 square_pure_parts_pullback(double alpha, double S);

// Hessian at the square: closed-form pure parts plus the correction -2 G[phi^v, phi^v]
// from the discrete eigenvector derivatives; zero cross terms set exactly.
SensitivityReport hessian_at_square_closed_form(double alpha, double S, const Mesh& m);

struct LocalMaxVerdict {
    double alpha = 0.0;
    double S = 1.0;
    int mesh_level = 0;
    double lambda = 0.0;
    Vector4 gradient = Vector4::Zero();
    Matrix4 hessian = Matrix4::Zero();
    // mu1 = lambda^{c,c}, mu2 = lambda^{S1,S1}, mu3 <= mu4 eigenvalues of the (a1, a2) block
    std::array<double, 4> mu{};
    double off_block_max = 0.0;
    double block_trace = 0.0;
    double block_det = 0.0;
    // Decomposition of the block: P = pure part, G_kl = G[phi^{ak}, phi^{al}]
    double pure_a = 0.0;
    double g11 = 0.0, g22 = 0.0, g12 = 0.0;
    double cauchy_schwarz_gap = 0.0;  // g11 g22 - g12^2
    double det_identity_residual = 0.0;
    bool pure_part_negative = false;  // the sign the textbook argument relies on
    bool negative_definite = false;
};

LocalMaxVerdict verify_local_max(double alpha, double S, const Mesh& m);

}  // namespace robinquad
