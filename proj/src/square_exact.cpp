#include "robinquad/square_exact.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "robinquad/errors.hpp"
#include "robinquad/quadrature.hpp"

namespace robinquad {

namespace {

constexpr int kRule = 32;

// Composite Gauss-Legendre on [a, b] with enough panels that exp(rate * width) stays tame.
template <class F>
double panel_integral(F&& f, double a, double b, double rate) {
    const int panels = std::max(1, static_cast<int>(std::ceil(rate * (b - a) / 6.0)));
    const GaussRule& g = gauss_rule(kRule);
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * h;
        const double mid = lo + 0.5 * h;
        double ps = 0.0;
        for (std::size_t q = 0; q < g.x.size(); ++q) ps += g.w[q] * f(mid + 0.5 * h * g.x[q]);
        s += 0.5 * h * ps;
    }
    return s;
}

double gprime(double t) {
    const double sech = 1.0 / std::cosh(t);
    return std::tanh(t) + t * sech * sech;
}

double fprime(double t) {
    const double sec = 1.0 / std::cos(t);
    return std::tan(t) + t * sec * sec;
}

// (value, derivative) in the separated variable: cosh/cos and its derivative factor
struct Factor {
    double value;
    double slope;
};

Factor factor(const SquareSolution& sol, double s) {
    const double k = sol.kappa();
    if (sol.alpha < 0.0) return {std::cosh(k * s), k * std::sinh(k * s)};
    return {std::cos(k * s), -k * std::sin(k * s)};
}

}  // namespace

double g_inverse(double x) {
    if (!(x >= 0.0)) throw DomainError("g_inverse requires x >= 0");
    if (x == 0.0) return 0.0;
    auto fn = [x](double t) { return std::make_pair(t * std::tanh(t) - x, gprime(t)); };
    const double guess = x < 1.0 ? std::sqrt(x) : x;
    std::uintmax_t iters = 200;
    double t = boost::math::tools::newton_raphson_iterate(fn, std::min(guess, x + 2.0), 0.0, x + 2.0,
                                                          std::numeric_limits<double>::digits, iters);
    // one polishing step; harmless once converged
    const auto [r, d] = fn(t);
    if (d > 0.0) {
        const double t2 = t - r / d;
        if (std::abs(t2 * std::tanh(t2) - x) < std::abs(r)) t = t2;
    }
    return t;
}

double f_inverse(double x) {
    if (!(x > 0.0)) throw DomainError("f_inverse requires x > 0");
    const double hi = std::nextafter(0.5 * std::numbers::pi, 0.0);
    auto fn = [x](double t) { return std::make_pair(t * std::tan(t) - x, fprime(t)); };
    const double guess = std::min(std::sqrt(x), 0.5 * std::numbers::pi * x / (1.0 + x));
    std::uintmax_t iters = 200;
    double t = boost::math::tools::newton_raphson_iterate(fn, guess, 0.0, hi, std::numeric_limits<double>::digits,
                                                          iters);
    const auto [r, d] = fn(t);
    if (d > 0.0) {
        const double t2 = t - r / d;
        if (t2 > 0.0 && t2 < hi && std::abs(t2 * std::tan(t2) - x) < std::abs(r)) t = t2;
    }
    return t;
}

SquareSolution solve_square(double alpha, double S) {
    if (alpha == 0.0 || !std::isfinite(alpha))
        throw DomainError("solve_square needs alpha != 0; at alpha = 0 the eigenfunction is the Neumann constant");
    if (!(S > 0.0) || !std::isfinite(S)) throw DomainError("solve_square needs S > 0");
    SquareSolution sol;
    sol.alpha = alpha;
    sol.S = S;
    sol.L = std::sqrt(S / 2.0);
    if (alpha < 0.0) {
        sol.t_star = g_inverse(-alpha * sol.L);
        sol.lambda1 = -2.0 * std::pow(sol.t_star / sol.L, 2);
    } else {
        sol.t_star = f_inverse(alpha * sol.L);
        sol.lambda1 = 2.0 * std::pow(sol.t_star / sol.L, 2);
    }
    const double k = sol.kappa();
    const double rate = 2.0 * k;
    const double L = sol.L;
    const double value_1d = panel_integral([&](double s) { return std::pow(factor(sol, s).value, 2); }, -L, L, rate);
    const double slope_1d = panel_integral([&](double s) { return std::pow(factor(sol, s).slope, 2); }, -L, L, rate);
    // The square norm is the product of the two 1-D integrals.
    sol.norm_const = 1.0 / value_1d;
    const double edge_factor = std::pow(factor(sol, L).value, 2);
    sol.boundary_norm_sq = 4.0 * edge_factor * value_1d / (value_1d * value_1d);
    sol.grad_norm_sq = 2.0 * slope_1d * value_1d / (value_1d * value_1d);
    return sol;
}

double eval_eigenfunction(const SquareSolution& sol, double x, double y) {
    const double s = std::sqrt(sol.S);
    if (std::abs(x) + std::abs(y) > s * (1.0 + 1e-12)) throw DomainError("point outside the reference square");
    const double u = (x + y) / std::numbers::sqrt2;
    const double v = (y - x) / std::numbers::sqrt2;
    return sol.norm_const * factor(sol, u).value * factor(sol, v).value;
}

Vec2 eval_gradient(const SquareSolution& sol, double x, double y) {
    const double s = std::sqrt(sol.S);
    if (std::abs(x) + std::abs(y) > s * (1.0 + 1e-12)) throw DomainError("point outside the reference square");
    const double u = (x + y) / std::numbers::sqrt2;
    const double v = (y - x) / std::numbers::sqrt2;
    const Factor fu = factor(sol, u);
    const Factor fv = factor(sol, v);
    const double du = sol.norm_const * fu.slope * fv.value;
    const double dv = sol.norm_const * fu.value * fv.slope;
    // d/dx = (du - dv)/sqrt2, d/dy = (du + dv)/sqrt2
    return Vec2((du - dv) / std::numbers::sqrt2, (du + dv) / std::numbers::sqrt2);
}

SquareSplitNorms square_split_norms(const SquareSolution& sol, int points) {
    gauss_rule(points);
    const double s = std::sqrt(sol.S);
    const double rate = 2.0 * sol.kappa() * std::numbers::sqrt2;
    SquareSplitNorms out;
    for (int half = 0; half < 2; ++half) {
        const double sign = half == 0 ? 1.0 : -1.0;
        auto area_integral = [&](auto&& integrand) {
            return panel_integral(
                [&](double y) {
                    const double w = s - y;
                    return panel_integral([&](double x) { return integrand(x, sign * y); }, -w, w, rate);
                },
                0.0, s, rate);
        };
        out.value_sq[half] = area_integral([&](double x, double y) { return std::pow(eval_eigenfunction(sol, x, y), 2); });
        out.dx_sq[half] = area_integral([&](double x, double y) { return std::pow(eval_gradient(sol, x, y).x(), 2); });
        out.dy_sq[half] = area_integral([&](double x, double y) { return std::pow(eval_gradient(sol, x, y).y(), 2); });
        out.dx_dy[half] = area_integral([&](double x, double y) {
            const Vec2 g = eval_gradient(sol, x, y);
            return g.x() * g.y();
        });
    }
    for (EdgeId e : kEdges) {
        const auto [a, b] = reference_edge(e, sol.S);
        const double len = (b - a).norm();
        out.edge_sq[edge_index(e)] =
            len * panel_integral(
                      [&](double t) {
                          const Vec2 x = a + t * (b - a);
                          return std::pow(eval_eigenfunction(sol, x.x(), x.y()), 2);
                      },
                      0.0, 1.0, rate * len);
    }
    return out;
}

double zeta(double alpha, double C, double S) {
    if (!(alpha < 0.0)) throw DomainError("zeta requires alpha < 0");
    if (!(C > 0.0 && C < 1.0)) throw DomainError("zeta requires 0 < C < 1");
    const SquareSolution sol = solve_square(alpha, S);
    return sol.grad_norm_sq + alpha * C * sol.boundary_norm_sq;
}

double dlambda_dalpha(const SquareSolution& sol) { return sol.boundary_norm_sq; }

double dlambda_dalpha_chain(const SquareSolution& sol) {
    const double t = sol.t_star;
    if (t == 0.0) return 2.0 / sol.L;
    const double d = sol.alpha < 0.0 ? gprime(t) : fprime(t);
    return 4.0 * t / (sol.L * d);
}

}  // namespace robinquad
