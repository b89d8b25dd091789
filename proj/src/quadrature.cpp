#include "robinquad/quadrature.hpp"

#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "robinquad/errors.hpp"

namespace robinquad {

namespace {

template <int N>
GaussRule expand() {
    using Rule = boost::math::quadrature::gauss<double, N>;
    const auto& xs = Rule::abscissa();
    const auto& ws = Rule::weights();
    GaussRule r;
    // boost stores the non-negative half; zero appears first for odd N
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (xs[k] == 0.0) {
            r.x.push_back(0.0);
            r.w.push_back(ws[k]);
            continue;
        }
        r.x.push_back(-xs[k]);
        r.w.push_back(ws[k]);
        r.x.push_back(xs[k]);
        r.w.push_back(ws[k]);
    }
    return r;
}

}  // namespace

const GaussRule& gauss_rule(int points) {
    static const GaussRule g3 = expand<3>();
    static const GaussRule g4 = expand<4>();
    static const GaussRule g8 = expand<8>();
    static const GaussRule g16 = expand<16>();
    static const GaussRule g32 = expand<32>();
    static const GaussRule g64 = expand<64>();
    switch (points) {
        case 3: return g3;
        case 4: return g4;
        case 8: return g8;
        case 16: return g16;
        case 32: return g32;
        case 64: return g64;
        default:
            throw ContractError("unsupported Gauss-Legendre order " + std::to_string(points) +
                                " (use 3, 4, 8, 16, 32 or 64)");
    }
}

double integrate_interval(const std::function<double(double)>& f, double a, double b, int points) {
    const GaussRule& g = gauss_rule(points);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t k = 0; k < g.x.size(); ++k) s += g.w[k] * f(mid + half * g.x[k]);
    return half * s;
}

double integrate_triangle(const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& p0,
                          const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, int points) {
    const GaussRule& g = gauss_rule(points);
    const Eigen::Vector2d e1 = p1 - p0;
    const Eigen::Vector2d e2 = p2 - p0;
    const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    // Duffy: (s, t) in [0,1]^2 -> (s, (1-s) t) on the unit triangle, Jacobian (1-s)
    double sum = 0.0;
    for (std::size_t a = 0; a < g.x.size(); ++a) {
        const double s = 0.5 * (g.x[a] + 1.0);
        for (std::size_t b = 0; b < g.x.size(); ++b) {
            const double t = 0.5 * (g.x[b] + 1.0);
            const double r = s;
            const double q = (1.0 - s) * t;
            sum += 0.25 * g.w[a] * g.w[b] * (1.0 - s) * f(p0 + r * e1 + q * e2);
        }
    }
    return jac * sum;
}

double integrate_segment(const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& a,
                         const Eigen::Vector2d& b, int points) {
    const double len = (b - a).norm();
    return integrate_interval([&](double t) { return f(a + t * (b - a)); }, 0.0, 1.0, points) * len;
}

}  // namespace robinquad
