#include "robinquad/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

#include "robinquad/errors.hpp"

namespace robinquad {

const char* method_name(Method m) {
    switch (m) {
        case Method::ClosedForm: return "closed_form";
        case Method::DiscreteFormula: return "discrete_formula";
        case Method::FiniteDifference: return "finite_difference";
    }
    return "?";
}

Method method_from_name(const std::string& s) {
    if (s == "closed_form" || s == "closed") return Method::ClosedForm;
    if (s == "discrete_formula" || s == "discrete") return Method::DiscreteFormula;
    if (s == "finite_difference" || s == "fd") return Method::FiniteDifference;
    throw DomainError("unknown method '" + s + "' (expected closed, discrete or fd)");
}

namespace {

int idx(Param v) { return static_cast<int>(v); }

double scale_of(double x) { return std::max(1.0, std::abs(x)); }

}  // namespace

SensitivityContext::SensitivityContext(const QuadParams& p, double alpha, const Mesh& m, const SolveOptions& opt)
    : p_(p), alpha_(alpha), mesh_(std::make_shared<const Mesh>(m)), ops_(build_reference_operators(m)) {
    p.validate();
    sys_ = assemble_transformed(p, alpha, *mesh_, ops_);
    if (opt.shift_hint) {
        eig_ = solve_lowest(sys_, opt);
    } else {
        eig_ = solve_quad(p, alpha, *mesh_, opt);
    }
    coef_ = form_derivative_coefficients(p, alpha);
}

double SensitivityContext::first_derivative(Param v) const {
    const FormCoefficients& d = coef_.first[idx(v)];
    const Vector& phi = eig_.vector;
    return ops_.stiffness_form(d, phi, phi) - eig_.lambda * ops_.mass_form(d, phi, phi);
}

Vector4 SensitivityContext::gradient() const {
    Vector4 g;
    for (Param v : kParams) g(idx(v)) = first_derivative(v);
    return g;
}

double SensitivityContext::spectral_gap() const {
    if (gap_ < 0.0) gap_ = second_eigenvalue_bracket(sys_, eig_.lambda) - eig_.lambda;
    return gap_;
}

const std::array<Vector, 4>& SensitivityContext::eigenvector_derivatives() const {
    if (have_derivs_) return derivs_;
    const double lambda = eig_.lambda;
    const double gap = spectral_gap();
    if (gap <= 1e-8 * scale_of(lambda)) {
        std::ostringstream os;
        os << "lowest eigenvalue " << lambda << " is nearly degenerate (gap " << gap << ")";
        throw ConditioningError(os.str(), gap);
    }
    const int n = sys_.dof_count;
    const Vector& phi = eig_.vector;
    const Vector mphi = sys_.mass * phi;

    const SparseMatrix shifted = sys_.stiffness_plus_boundary - lambda * sys_.mass;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(shifted.nonZeros() + 2 * n);
    for (int k = 0; k < shifted.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(shifted, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < n; ++k) {
        t.emplace_back(k, n, mphi(k));
        t.emplace_back(n, k, mphi(k));
    }
    SparseMatrix bordered(n + 1, n + 1);
    bordered.setFromTriplets(t.begin(), t.end());
    bordered.makeCompressed();

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(bordered);
    if (lu.info() != Eigen::Success) throw NumericalError("bordered eigenvector-derivative system is singular");

    double worst = 0.0;
    for (Param v : kParams) {
        const FormCoefficients& d = coef_.first[idx(v)];
        const SparseMatrix kv = ops_.stiffness(d);
        const SparseMatrix mv = ops_.mass_matrix(d);
        const double lv = first_derivative(v);
        Vector rhs(n + 1);
        rhs.head(n) = -(kv * phi - lambda * (mv * phi) - lv * mphi);
        rhs(n) = -0.5 * phi.dot(mv * phi);
        const Vector x = lu.solve(rhs);
        const Vector r = bordered * x - rhs;
        const double denom = rhs.lpNorm<Eigen::Infinity>() + eig_.stiffness_norm * x.lpNorm<Eigen::Infinity>();
        worst = std::max(worst, denom > 0.0 ? r.lpNorm<Eigen::Infinity>() / denom : 0.0);
        derivs_[idx(v)] = x.head(n);
    }
    deriv_residual_ = worst;
    have_derivs_ = true;
    return derivs_;
}

double SensitivityContext::eigenvector_derivative_residual() const {
    eigenvector_derivatives();
    return deriv_residual_;
}

double SensitivityContext::g_form(const Vector& f, const Vector& g) const {
    return f.dot(sys_.stiffness_plus_boundary * g) - eig_.lambda * f.dot(sys_.mass * g);
}

double SensitivityContext::pure_form_part(Param v1, Param v2) const {
    const FormCoefficients& d = coef_.second[idx(v1)][idx(v2)];
    const Vector& phi = eig_.vector;
    return ops_.stiffness_form(d, phi, phi) - eig_.lambda * ops_.mass_form(d, phi, phi);
}

double SensitivityContext::second_derivative(Param v1, Param v2) const {
    const Vector& phi = eig_.vector;
    const double lambda = eig_.lambda;
    const FormCoefficients& d1 = coef_.first[idx(v1)];
    const Vector& dphi2 = eigenvector_derivatives()[idx(v2)];
    const double l2 = first_derivative(v2);
    return pure_form_part(v1, v2) - l2 * ops_.mass_form(d1, phi, phi) +
           2.0 * (ops_.stiffness_form(d1, dphi2, phi) - lambda * ops_.mass_form(d1, dphi2, phi));
}

Matrix4 SensitivityContext::hessian() const {
    Matrix4 h;
    for (Param a : kParams)
        for (Param b : kParams) h(idx(a), idx(b)) = second_derivative(a, b);
    return h;
}

double first_derivative(const QuadParams& p, double alpha, Param v, const Mesh& m) {
    return SensitivityContext(p, alpha, m).first_derivative(v);
}

Vector eigenvector_derivative(const QuadParams& p, double alpha, Param v, const Mesh& m) {
    return SensitivityContext(p, alpha, m).eigenvector_derivative(v);
}

double second_derivative(const QuadParams& p, double alpha, Param v1, Param v2, const Mesh& m) {
    return SensitivityContext(p, alpha, m).second_derivative(v1, v2);
}

SensitivityReport discrete_report(const QuadParams& p, double alpha, const Mesh& m) {
    const SensitivityContext ctx(p, alpha, m);
    SensitivityReport r;
    r.params = p;
    r.alpha = alpha;
    r.mesh_level = m.refinement_level;
    r.lambda = ctx.eigenpair().lambda;
    r.gradient = ctx.gradient();
    r.hessian = ctx.hessian();
    r.gradient_method.fill(Method::DiscreteFormula);
    for (auto& row : r.hessian_method) row.fill(Method::DiscreteFormula);
    return r;
}

namespace {

double lambda_at(const QuadParams& q, double alpha, const Mesh& m, const ReferenceOperators& ops, double hint) {
    SolveOptions o;
    o.shift_hint = hint;
    return solve_lowest(assemble_transformed(q, alpha, m, ops), o).lambda;
}

QuadParams shifted(QuadParams p, Param v, double dv) { return with_param(p, v, param_value(p, v) + dv); }

}  // namespace

double finite_difference_first(const QuadParams& p, double alpha, Param v, const Mesh& m, double step,
                               double lambda_hint) {
    const ReferenceOperators ops = build_reference_operators(m);
    const double h = step * scale_of(param_value(p, v));
    return (lambda_at(shifted(p, v, h), alpha, m, ops, lambda_hint) -
            lambda_at(shifted(p, v, -h), alpha, m, ops, lambda_hint)) /
           (2.0 * h);
}

SensitivityReport finite_difference_report(const QuadParams& p, double alpha, const Mesh& m,
                                           const FiniteDifferenceOptions& opt) {
    p.validate();
    const ReferenceOperators ops = build_reference_operators(m);
    const double l0 = solve_quad(p, alpha, m).lambda;
    auto lam = [&](const QuadParams& q) { return lambda_at(q, alpha, m, ops, l0); };

    SensitivityReport r;
    r.params = p;
    r.alpha = alpha;
    r.mesh_level = m.refinement_level;
    r.lambda = l0;
    std::array<double, 4> h2{};
    for (Param v : kParams) {
        const int i = idx(v);
        const double h = opt.first_step * scale_of(param_value(p, v));
        r.gradient(i) = (lam(shifted(p, v, h)) - lam(shifted(p, v, -h))) / (2.0 * h);
        h2[i] = opt.second_step * scale_of(param_value(p, v));
    }
    for (Param a : kParams) {
        const int i = idx(a);
        const double h = h2[i];
        r.hessian(i, i) = (-lam(shifted(p, a, 2 * h)) + 16.0 * lam(shifted(p, a, h)) - 30.0 * l0 +
                           16.0 * lam(shifted(p, a, -h)) - lam(shifted(p, a, -2 * h))) /
                          (12.0 * h * h);
        for (Param b : kParams) {
            const int j = idx(b);
            if (j <= i) continue;
            const double k = h2[j];
            const double v = (lam(shifted(shifted(p, a, h), b, k)) - lam(shifted(shifted(p, a, h), b, -k)) -
                              lam(shifted(shifted(p, a, -h), b, k)) + lam(shifted(shifted(p, a, -h), b, -k))) /
                             (4.0 * h * k);
            r.hessian(i, j) = r.hessian(j, i) = v;
        }
    }
    r.gradient_method.fill(Method::FiniteDifference);
    for (auto& row : r.hessian_method) row.fill(Method::FiniteDifference);
    return r;
}

Vector4 square_pure_parts(double alpha, double S) {
    const SquareSolution sol = solve_square(alpha, S);
    const double E = sol.grad_norm_sq;
    const double B = sol.boundary_norm_sq;
    const double a = E / (2.0 * S) + alpha * B / (8.0 * S);
    return Vector4(a, a, 4.0 * E / S + 2.0 * alpha * B / S, E / (S * S) + alpha * B / (4.0 * S * S));
}

Vector4 square_pure_parts_pullback(double alpha, double S) {
    const SquareSolution sol = solve_square(alpha, S);
    const double E = sol.grad_norm_sq;
    const double B = sol.boundary_norm_sq;
    const double a = E / (2.0 * S) + alpha * B / (8.0 * S);
    return Vector4(a, a, 4.0 * E / S + 2.0 * alpha * B / S, 3.0 * E / (S * S) + 5.0 * alpha * B / (4.0 * S * S));
}

SensitivityReport hessian_at_square_closed_form(double alpha, double S, const Mesh& m) {
    if (!(alpha < 0.0)) throw DomainError("the closed-form Hessian at the square needs alpha < 0");
    const QuadParams sq = QuadParams::square(S);
    const SensitivityContext ctx(sq, alpha, m);
    const Vector4 pure = square_pure_parts(alpha, S);
    const auto& dphi = ctx.eigenvector_derivatives();

    SensitivityReport r;
    r.params = sq;
    r.alpha = alpha;
    r.mesh_level = m.refinement_level;
    r.lambda = ctx.eigenpair().lambda;
    r.gradient.setZero();
    r.gradient_method.fill(Method::ClosedForm);
    for (auto& row : r.hessian_method) row.fill(Method::ClosedForm);
    for (int v = 0; v < 4; ++v) r.hessian(v, v) = pure(v) - 2.0 * ctx.g_form(dphi[v], dphi[v]);
    const int a1 = idx(Param::a1), a2 = idx(Param::a2);
    r.hessian(a1, a2) = r.hessian(a2, a1) =
        ctx.pure_form_part(Param::a1, Param::a2) - 2.0 * ctx.g_form(dphi[a1], dphi[a2]);
    r.hessian_method[a1][a2] = r.hessian_method[a2][a1] = Method::DiscreteFormula;
    return r;
}

LocalMaxVerdict verify_local_max(double alpha, double S, const Mesh& m) {
    if (!(alpha < 0.0)) throw DomainError("local maximality is checked for alpha < 0");
    const SensitivityContext ctx(QuadParams::square(S), alpha, m);
    LocalMaxVerdict out;
    out.alpha = alpha;
    out.S = S;
    out.mesh_level = m.refinement_level;
    out.lambda = ctx.eigenpair().lambda;
    out.gradient = ctx.gradient();
    out.hessian = ctx.hessian();
    const Matrix4& H = out.hessian;
    const int a1 = idx(Param::a1), a2 = idx(Param::a2), c = idx(Param::c), s1 = idx(Param::S1);

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const bool in_block = (i == j) || ((i == a1 || i == a2) && (j == a1 || j == a2));
            if (!in_block) out.off_block_max = std::max(out.off_block_max, std::abs(H(i, j)));
        }
    Eigen::Matrix2d block;
    const double off = 0.5 * (H(a1, a2) + H(a2, a1));
    block << H(a1, a1), off, off, H(a2, a2);
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(block).eigenvalues();
    out.mu = {H(c, c), H(s1, s1), ev(0), ev(1)};
    out.block_trace = block.trace();
    out.block_det = block.determinant();

    const auto& dphi = ctx.eigenvector_derivatives();
    out.pure_a = ctx.pure_form_part(Param::a1, Param::a1);
    out.g11 = ctx.g_form(dphi[a1], dphi[a1]);
    out.g22 = ctx.g_form(dphi[a2], dphi[a2]);
    out.g12 = ctx.g_form(dphi[a1], dphi[a2]);
    out.cauchy_schwarz_gap = out.g11 * out.g22 - out.g12 * out.g12;
    const double P = out.pure_a;
    const double expanded = P * P - 2.0 * P * (out.g11 + out.g22) + 4.0 * out.cauchy_schwarz_gap;
    out.det_identity_residual = std::abs(out.block_det - expanded);
    out.pure_part_negative = P < 0.0;
    out.negative_definite = std::all_of(out.mu.begin(), out.mu.end(), [](double x) { return x < 0.0; });
    return out;
}

}  // namespace robinquad
