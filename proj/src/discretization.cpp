#include "robinquad/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "robinquad/errors.hpp"
#include "robinquad/quadrature.hpp"

namespace robinquad {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct Element {
    double area;
    std::array<Vec2, 3> grad;  // gradients of the barycentric coordinates
};

Element element(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    const double twice = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
    if (!(twice > 0.0)) throw GeometryError("degenerate or inverted triangle in assembly");
    Element e;
    e.area = 0.5 * twice;
    e.grad[0] = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / twice;
    e.grad[1] = Vec2(p2.y() - p0.y(), p0.x() - p2.x()) / twice;
    e.grad[2] = Vec2(p0.y() - p1.y(), p1.x() - p0.x()) / twice;
    return e;
}

// int_segment phi_a phi_b with the 3-point Gauss rule; phi_0 = 1 - t, phi_1 = t
std::array<std::array<double, 2>, 2> segment_mass(double length) {
    const GaussRule& g = gauss_rule(3);
    std::array<std::array<double, 2>, 2> m{};
    for (std::size_t q = 0; q < g.x.size(); ++q) {
        const double t = 0.5 * (g.x[q] + 1.0);
        const std::array<double, 2> phi{1.0 - t, t};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) m[a][b] += 0.5 * g.w[q] * phi[a] * phi[b] * length;
    }
    return m;
}

SparseMatrix from_triplets(int n, const Triplets& t) {
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

double inf_norm(const SparseMatrix& a) {
    Vector rows = Vector::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) rows(it.row()) += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

// LDL^T factorisations of K - sigma M sharing one symbolic analysis.
class ShiftedFactor {
public:
    explicit ShiftedFactor(const AssembledSystem& sys) : sys_(sys) {
        pattern_ = sys.stiffness_plus_boundary + sys.mass;
        ldlt_.analyzePattern(pattern_);
    }

    // Factorises K - sigma M; returns false on breakdown.
    bool factorize(double sigma) {
        const SparseMatrix a = sys_.stiffness_plus_boundary - sigma * sys_.mass;
        ldlt_.factorize(a);
        ++count_;
        sigma_ = sigma;
        return ldlt_.info() == Eigen::Success && (ldlt_.vectorD().array() != 0.0).all();
    }

    // Number of eigenvalues below sigma; nudges sigma on a zero pivot.
    int inertia(double sigma) {
        for (int attempt = 0; attempt < 8; ++attempt) {
            if (factorize(sigma)) return static_cast<int>((ldlt_.vectorD().array() < 0.0).count());
            sigma += 1e-12 * std::max(1.0, std::abs(sigma)) * (attempt + 1);
        }
        throw NumericalError("LDL^T factorisation failed repeatedly near shift " + std::to_string(sigma));
    }

    Vector solve(const Vector& b) const { return ldlt_.solve(b); }
    double sigma() const { return sigma_; }
    int factorizations() const { return count_; }

private:
    const AssembledSystem& sys_;
    SparseMatrix pattern_;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
    int count_ = 0;
    double sigma_ = 0.0;
};

}  // namespace

SparseMatrix ReferenceOperators::stiffness(const FormCoefficients& f) const {
    SparseMatrix k(dof_count, dof_count);
    for (int h = 0; h < 2; ++h) {
        k += f.interior[h](0, 0) * grad[h][0];
        k += 0.5 * (f.interior[h](0, 1) + f.interior[h](1, 0)) * grad[h][1];
        k += f.interior[h](1, 1) * grad[h][2];
    }
    for (int e = 0; e < 4; ++e) k += f.boundary[e] * edge[e];
    return k;
}

SparseMatrix ReferenceOperators::mass_matrix(const FormCoefficients& f) const {
    SparseMatrix m(dof_count, dof_count);
    for (int h = 0; h < 2; ++h) m += f.mass[h] * mass[h];
    return m;
}

double ReferenceOperators::stiffness_form(const FormCoefficients& f, const Vector& u, const Vector& v) const {
    double s = 0.0;
    for (int h = 0; h < 2; ++h) {
        s += f.interior[h](0, 0) * u.dot(grad[h][0] * v);
        s += 0.5 * (f.interior[h](0, 1) + f.interior[h](1, 0)) * u.dot(grad[h][1] * v);
        s += f.interior[h](1, 1) * u.dot(grad[h][2] * v);
    }
    for (int e = 0; e < 4; ++e)
        if (f.boundary[e] != 0.0) s += f.boundary[e] * u.dot(edge[e] * v);
    return s;
}

double ReferenceOperators::mass_form(const FormCoefficients& f, const Vector& u, const Vector& v) const {
    double s = 0.0;
    for (int h = 0; h < 2; ++h)
        if (f.mass[h] != 0.0) s += f.mass[h] * u.dot(mass[h] * v);
    return s;
}

ReferenceOperators build_reference_operators(const Mesh& m) {
    m.check_split();
    const int n = static_cast<int>(m.nodes.size());
    std::array<std::array<Triplets, 3>, 2> g;
    std::array<Triplets, 2> ms;
    std::array<Triplets, 4> ed;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        const int h = m.triangle_half[t] - 1;
        const Element el = element(m.nodes[tri[0]], m.nodes[tri[1]], m.nodes[tri[2]]);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const Vec2& ga = el.grad[a];
                const Vec2& gb = el.grad[b];
                g[h][0].emplace_back(tri[a], tri[b], el.area * ga.x() * gb.x());
                g[h][1].emplace_back(tri[a], tri[b], el.area * (ga.x() * gb.y() + ga.y() * gb.x()));
                g[h][2].emplace_back(tri[a], tri[b], el.area * ga.y() * gb.y());
                ms[h].emplace_back(tri[a], tri[b], el.area / 12.0 * (a == b ? 2.0 : 1.0));
            }
    }
    for (const auto& be : m.boundary_edges) {
        const auto sm = segment_mass((m.nodes[be.a] - m.nodes[be.b]).norm());
        const std::array<int, 2> id{be.a, be.b};
        auto& t = ed[edge_index(be.edge)];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) t.emplace_back(id[a], id[b], sm[a][b]);
    }
    ReferenceOperators ops;
    ops.dof_count = n;
    for (int h = 0; h < 2; ++h) {
        for (int k = 0; k < 3; ++k) ops.grad[h][k] = from_triplets(n, g[h][k]);
        ops.mass[h] = from_triplets(n, ms[h]);
    }
    for (int e = 0; e < 4; ++e) ops.edge[e] = from_triplets(n, ed[e]);
    return ops;
}

std::optional<std::string> boundary_layer_warning(double alpha, double S, double h) {
    const double a = std::abs(alpha);
    if (a * std::sqrt(2.0 * S) > 30.0 && h > 0.2 / a) {
        std::ostringstream os;
        os << "boundary layer of width ~1/|alpha| = " << 1.0 / a << " is under-resolved by mesh size h = " << h
           << "; refine to h <= " << 0.2 / a;
        return os.str();
    }
    return std::nullopt;
}

AssembledSystem assemble_transformed(const QuadParams& p, double alpha, const Mesh& m) {
    return assemble_transformed(p, alpha, m, build_reference_operators(m));
}

AssembledSystem assemble_transformed(const QuadParams& p, double alpha, const Mesh& m,
                                     const ReferenceOperators& ops, Weighting w) {
    p.validate();
    if (ops.dof_count != static_cast<int>(m.nodes.size()))
        throw ContractError("reference operators were built for a different mesh");
    if (std::abs(m.S - p.S) > 1e-14 * p.S) throw ContractError("mesh scale S differs from the quadrilateral's S");
    const FormCoefficients f = form_coefficients(p, alpha, w);
    AssembledSystem sys;
    sys.stiffness_plus_boundary = ops.stiffness(f);
    sys.mass = ops.mass_matrix(f);
    sys.dof_count = ops.dof_count;
    if (auto msg = boundary_layer_warning(alpha, p.S, m.h())) sys.warnings.push_back(*msg);
    return sys;
}

AssembledSystem assemble_direct(const QuadParams& p, double alpha, const Mesh& m) {
    p.validate();
    m.check_split();
    if (std::abs(m.S - p.S) > 1e-14 * p.S) throw ContractError("mesh scale S differs from the quadrilateral's S");
    const auto L = map_forward(p);
    auto push = [&](int node, int half) {
        const Vec2& x = m.nodes[node];
        return half == 1 ? Vec2(L.upper * x) : Vec2(L.lower * x);
    };
    const int n = static_cast<int>(m.nodes.size());
    Triplets kt, mt;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        const int half = m.triangle_half[t];
        const Element el = element(push(tri[0], half), push(tri[1], half), push(tri[2], half));
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                kt.emplace_back(tri[a], tri[b], el.area * el.grad[a].dot(el.grad[b]));
                mt.emplace_back(tri[a], tri[b], el.area / 12.0 * (a == b ? 2.0 : 1.0));
            }
    }
    for (const auto& be : m.boundary_edges) {
        const auto sm = segment_mass((push(be.a, be.edge.j) - push(be.b, be.edge.j)).norm());
        const std::array<int, 2> id{be.a, be.b};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) kt.emplace_back(id[a], id[b], alpha * sm[a][b]);
    }
    AssembledSystem sys;
    sys.stiffness_plus_boundary = from_triplets(n, kt);
    sys.mass = from_triplets(n, mt);
    sys.dof_count = n;
    if (auto msg = boundary_layer_warning(alpha, p.S, m.h())) sys.warnings.push_back(*msg);
    return sys;
}

double rayleigh(const AssembledSystem& sys, const Vector& v) {
    if (v.size() != sys.dof_count) throw ContractError("vector length does not match the system");
    const double den = v.dot(sys.mass * v);
    if (!(den > 0.0)) throw DomainError("Rayleigh quotient of the zero vector");
    return v.dot(sys.stiffness_plus_boundary * v) / den;
}

int count_below(const AssembledSystem& sys, double sigma) {
    ShiftedFactor f(sys);
    return f.inertia(sigma);
}

EigenPair solve_lowest(const AssembledSystem& sys, const SolveOptions& opt) {
    const int n = sys.dof_count;
    if (n == 0) throw ContractError("empty system");
    ShiftedFactor fac(sys);
    const double knorm = inf_norm(sys.stiffness_plus_boundary);

    // Upper bound on lambda_1 from the constant vector.
    const Vector ones = Vector::Ones(n);
    double hi = rayleigh(sys, ones);
    auto scale = [](double x) { return std::max(1.0, std::abs(x)); };

    double lo;
    if (opt.shift_hint && std::isfinite(*opt.shift_hint)) {
        const double hint = *opt.shift_hint;
        double d = 1e-3 * scale(hint);
        if (fac.inertia(hint + d) >= 1) hi = std::min(hi, hint + d);
        lo = std::min(hint, hi) - d;
    } else {
        lo = hi - 0.1 * scale(hi);
    }
    // Walk down until nothing lies below the shift.
    for (int k = 0; fac.inertia(lo) > 0; ++k) {
        if (k > 200) throw NumericalError("could not bracket the lowest eigenvalue from below");
        hi = lo;
        lo -= std::ldexp(0.1 * scale(lo), k);
    }
    // If hi was not an upper bound (only possible through rounding), walk it up.
    for (int k = 0; fac.inertia(hi) == 0; ++k) {
        if (k > 200) throw NumericalError("could not bracket the lowest eigenvalue from above");
        lo = hi;
        hi += std::ldexp(1e-3 * scale(hi), k);
    }
    // Narrow the bracket so that the shift sits close to lambda_1.
    while (hi - lo > 1e-3 * scale(lo)) {
        const double mid = 0.5 * (lo + hi);
        if (fac.inertia(mid) == 0) lo = mid;
        else hi = mid;
    }

    if (!fac.factorize(lo)) throw NumericalError("factorisation failed at the working shift");
    Vector x = ones / std::sqrt(ones.dot(sys.mass * ones));
    EigenPair out;
    bool refined = false;
    double rho = hi;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        Vector y = fac.solve(sys.mass * x);
        y /= std::sqrt(y.dot(sys.mass * y));
        if (y.sum() < 0.0) y = -y;
        const double rho_new = y.dot(sys.stiffness_plus_boundary * y);
        const Vector r = sys.stiffness_plus_boundary * y - rho_new * (sys.mass * y);
        const double res = r.lpNorm<Eigen::Infinity>();
        const double change = std::abs(rho_new - rho);
        x = y;
        rho = rho_new;
        out.iterations = it;
        if (res <= 1e-13 * knorm || (change <= opt.tolerance * scale(rho) && res <= 1e-11 * knorm)) break;
        if (!refined && res <= 1e-5 * knorm) {
            // Move the shift next to the eigenvalue; keep it below lambda_1.
            const double s = rho - 1e-9 * scale(rho);
            if (s > lo && fac.inertia(s) == 0) lo = s;
            refined = true;
            if (!fac.factorize(lo)) throw NumericalError("factorisation failed at the refined shift");
        }
        if (it == opt.max_iterations) {
            std::ostringstream os;
            os << "inverse iteration did not converge: lambda ~ " << rho << ", residual " << res
               << ", ||K|| " << knorm << ", shift " << lo << ", iterations " << it;
            throw NumericalError(os.str());
        }
    }
    out.lambda = rho;
    out.vector = x;
    out.stiffness_norm = knorm;
    out.residual = (sys.stiffness_plus_boundary * x - rho * (sys.mass * x)).lpNorm<Eigen::Infinity>();
    out.factorizations = fac.factorizations();
    return out;
}

double second_eigenvalue_bracket(const AssembledSystem& sys, double lambda1, double rel) {
    ShiftedFactor fac(sys);
    const double base = 1e-8 * std::max(1.0, std::abs(lambda1));
    double d = base;
    int k = 0;
    while (fac.inertia(lambda1 + d) < 2) {
        if (++k > 200) throw NumericalError("no second eigenvalue found above lambda_1");
        d *= 2.0;
    }
    double lo = lambda1 + (k == 0 ? 0.0 : 0.5 * d);
    double hi = lambda1 + d;
    if (k == 0) return lambda1;  // second eigenvalue within roundoff of the first
    while (hi - lo > rel * (hi - lambda1)) {
        const double mid = 0.5 * (lo + hi);
        if (fac.inertia(mid) < 2) lo = mid;
        else hi = mid;
    }
    return lo;
}

EigenPair solve_quad(const QuadParams& p, double alpha, const Mesh& m, const SolveOptions& opt) {
    SolveOptions o = opt;
    if (!o.shift_hint) {
        const Mesh coarse = build_mesh(std::min(8, m.refinement_level), m.S);
        const AssembledSystem cs = assemble_transformed(p, alpha, coarse);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(cs.stiffness_plus_boundary),
                                                                     Eigen::MatrixXd(cs.mass),
                                                                     Eigen::EigenvaluesOnly);
        if (es.info() == Eigen::Success) o.shift_hint = es.eigenvalues()(0);
    }
    return solve_lowest(assemble_transformed(p, alpha, m), o);
}

void write_coordinate(std::ostream& os, const SparseMatrix& a) {
    os.precision(17);
    os << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace robinquad
