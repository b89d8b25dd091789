#include "robinquad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "robinquad/errors.hpp"
#include "robinquad/quadrature.hpp"

namespace robinquad {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const std::array<Vec2, 4>& pts) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += cross(pts[k], pts[(k + 1) % 4]);
    return 0.5 * s;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

// Distance from p to a convex polygon given in either orientation.
template <std::size_t N>
double convex_polygon_distance(const Vec2& p, const std::array<Vec2, N>& poly) {
    bool pos = false, neg = false;
    for (std::size_t k = 0; k < N; ++k) {
        const double cr = cross(poly[(k + 1) % N] - poly[k], p - poly[k]);
        if (cr > 0.0) pos = true;
        if (cr < 0.0) neg = true;
    }
    if (!(pos && neg)) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < N; ++k) d = std::min(d, point_segment_distance(p, poly[k], poly[(k + 1) % N]));
    return d;
}

Vec2 polygon_centroid(const std::array<Vec2, 4>& pts) {
    double a = 0.0;
    Vec2 g = Vec2::Zero();
    for (int k = 0; k < 4; ++k) {
        const double cr = cross(pts[k], pts[(k + 1) % 4]);
        a += cr;
        g += cr * (pts[k] + pts[(k + 1) % 4]);
    }
    return g / (3.0 * a);
}

}  // namespace

QuadParams QuadParams::square(double S) { return QuadParams{0.0, 0.0, std::sqrt(S), S, S}; }

double QuadParams::c0() const { return std::sqrt(S); }

void QuadParams::validate() const {
    auto fail = [&](const std::string& why) {
        std::ostringstream os;
        os << "invalid quadrilateral parameters (a1=" << a1 << ", a2=" << a2 << ", c=" << c << ", S1=" << S1
           << ", S=" << S << "): " << why;
        throw DomainError(os.str());
    };
    if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(c) || !std::isfinite(S1) || !std::isfinite(S))
        fail("non-finite value");
    if (!(S > 0.0)) fail("S must be positive");
    if (!(c > 0.0)) fail("c must be positive");
    if (!(S1 > 0.0 && S1 < 2.0 * S)) fail("S1 must lie in (0, 2S)");
}

bool QuadParams::is_square(double tol) const {
    const double s = std::sqrt(S);
    return std::abs(a1) <= tol * s && std::abs(a2) <= tol * s && std::abs(c - s) <= tol * s &&
           std::abs(S1 - S) <= tol * S;
}

bool QuadParams::is_convex() const {
    const auto v = quad_vertices(*this);
    const double orient = signed_area(v);
    for (int k = 0; k < 4; ++k) {
        const Vec2& prev = v[(k + 3) % 4];
        const Vec2& next = v[(k + 1) % 4];
        if (cross(v[k] - prev, next - v[k]) * orient <= 0.0) return false;
    }
    return true;
}

const char* param_name(Param v) {
    switch (v) {
        case Param::a1: return "a1";
        case Param::a2: return "a2";
        case Param::c: return "c";
        case Param::S1: return "S1";
    }
    return "?";
}

Param param_from_name(const std::string& name) {
    for (Param v : kParams)
        if (name == param_name(v)) return v;
    throw DomainError("unknown parameter name '" + name + "' (expected a1, a2, c or S1)");
}

double param_value(const QuadParams& p, Param v) {
    switch (v) {
        case Param::a1: return p.a1;
        case Param::a2: return p.a2;
        case Param::c: return p.c;
        case Param::S1: return p.S1;
    }
    return 0.0;
}

QuadParams with_param(QuadParams p, Param v, double value) {
    switch (v) {
        case Param::a1: p.a1 = value; break;
        case Param::a2: p.a2 = value; break;
        case Param::c: p.c = value; break;
        case Param::S1: p.S1 = value; break;
    }
    return p;
}

int edge_index(EdgeId e) {
    if ((e.i != 1 && e.i != 2) || (e.j != 1 && e.j != 2))
        throw ContractError("edge indices must be 1 or 2");
    return 2 * (e.j - 1) + (e.i - 1);
}

std::array<Vec2, 4> quad_vertices(const QuadParams& p) {
    p.validate();
    return {Vec2(-p.c, 0.0), Vec2(p.a1, p.S1 / p.c), Vec2(p.c, 0.0), Vec2(p.a2, -p.S2() / p.c)};
}

double polygon_area(const std::array<Vec2, 4>& pts) { return std::abs(signed_area(pts)); }

std::pair<Vec2, Vec2> quad_edge(const QuadParams& p, EdgeId e) {
    const auto v = quad_vertices(p);
    const Vec2& apex = e.j == 1 ? v[1] : v[3];
    return e.i == 1 ? std::make_pair(v[0], apex) : std::make_pair(apex, v[2]);
}

std::pair<Vec2, Vec2> reference_edge(EdgeId e, double S) {
    const double s = std::sqrt(S);
    const Vec2 apex(0.0, e.j == 1 ? s : -s);
    return e.i == 1 ? std::make_pair(Vec2(-s, 0.0), apex) : std::make_pair(apex, Vec2(s, 0.0));
}

double edge_length(const QuadParams& p, EdgeId e) {
    p.validate();
    const double Sj = p.area(e.j);
    const double d = p.a(e.j) + edge_sign(e) * p.c;
    return std::sqrt(Sj * Sj / (p.c * p.c) + d * d);
}

double perimeter(const QuadParams& p) {
    double s = 0.0;
    for (EdgeId e : kEdges) s += edge_length(p, e);
    return s;
}

std::array<double, 4> interior_angles(const QuadParams& p) {
    const auto v = quad_vertices(p);
    const double orient = signed_area(v) > 0.0 ? 1.0 : -1.0;
    std::array<double, 4> out{};
    for (int k = 0; k < 4; ++k) {
        const Vec2 to_prev = v[(k + 3) % 4] - v[k];
        const Vec2 to_next = v[(k + 1) % 4] - v[k];
        const double cr = orient * cross(to_next, to_prev);
        const double dt = to_next.dot(to_prev);
        if (std::abs(cr) <= 1e-14 * to_prev.norm() * to_next.norm())
            throw GeometryError("collinear vertices at corner " + std::to_string(k));
        double th = std::atan2(cr, dt);
        if (th < 0.0) th += 2.0 * std::numbers::pi;
        out[k] = th;
    }
    return out;
}

PiecewiseLinearMap map_forward(const QuadParams& p) {
    p.validate();
    const double c0 = p.c0();
    PiecewiseLinearMap m;
    m.upper << p.c / c0, p.a1 * c0 / p.S, 0.0, c0 * p.S1 / (p.c * p.S);
    m.lower << p.c / c0, -p.a2 * c0 / p.S, 0.0, c0 * p.S2() / (p.c * p.S);
    return m;
}

PiecewiseLinearMap map_inverse(const QuadParams& p) {
    p.validate();
    const double c0 = p.c0();
    PiecewiseLinearMap m;
    m.upper << c0 / p.c, -p.a1 * c0 / p.S1, 0.0, p.c * p.S / (c0 * p.S1);
    m.lower << c0 / p.c, p.a2 * c0 / p.S2(), 0.0, p.c * p.S / (c0 * p.S2());
    return m;
}

PullbackCheck pullback_inner_products(const QuadParams& p, const ScalarField& u, const ScalarField& v, int order) {
    gauss_rule(order);  // rejects unsupported orders up front
    const auto L = map_forward(p);
    const auto ref = std::array<Vec2, 4>{Vec2(-p.c0(), 0.0), Vec2(0.0, p.c0()), Vec2(p.c0(), 0.0),
                                         Vec2(0.0, -p.c0())};
    const auto phys = quad_vertices(p);
    auto pulled = [&](const Vec2& x) {
        const Vec2 y = L(x);
        return u(y) * v(y);
    };
    auto plain = [&](const Vec2& y) { return u(y) * v(y); };

    PullbackCheck out;
    out.interior_reference = integrate_triangle(pulled, ref[0], ref[2], ref[1], order) +
                             integrate_triangle(pulled, ref[0], ref[2], ref[3], order);
    out.interior_physical = p.S / p.S1 * integrate_triangle(plain, phys[0], phys[2], phys[1], order) +
                            p.S / p.S2() * integrate_triangle(plain, phys[0], phys[2], phys[3], order);
    const double gamma0 = std::sqrt(2.0 * p.S);
    for (EdgeId e : kEdges) {
        const int k = edge_index(e);
        const auto [pa, pb] = quad_edge(p, e);
        const auto [ra, rb] = reference_edge(e, p.S);
        out.edge_physical[k] = integrate_segment(plain, pa, pb, order);
        // stay on the correct side of y = 0 at the shared endpoints
        auto pulled_edge = [&, j = e.j](const Vec2& x) {
            const Vec2 y = j == 1 ? Vec2(L.upper * x) : Vec2(L.lower * x);
            return u(y) * v(y);
        };
        out.edge_reference[k] = edge_length(p, e) / gamma0 * integrate_segment(pulled_edge, ra, rb, order);
    }
    return out;
}

double hausdorff_distance_to_square(const QuadParams& p, const HausdorffOptions& opt) {
    if (opt.rotations < 1 || opt.samples_per_edge < 1 || opt.interior_grid < 1)
        throw ContractError("Hausdorff sampling counts must be positive");
    auto q = quad_vertices(p);
    const Vec2 g = polygon_centroid(q);
    for (auto& x : q) x -= g;
    const bool convex = p.is_convex();
    const std::array<Vec2, 3> upper{q[0], q[1], q[2]};
    const std::array<Vec2, 3> lower{q[0], q[2], q[3]};
    auto dist_to_quad = [&](const Vec2& y) {
        if (convex) return convex_polygon_distance(y, q);
        return std::min(convex_polygon_distance(y, upper), convex_polygon_distance(y, lower));
    };

    // Points of the square where the distance to the quad can peak (before rotation).
    const double s = std::sqrt(p.S);
    const std::array<Vec2, 4> sq{Vec2(-s, 0.0), Vec2(0.0, s), Vec2(s, 0.0), Vec2(0.0, -s)};
    std::vector<Vec2> probes(sq.begin(), sq.end());
    if (!convex) {
        for (int k = 0; k < 4; ++k)
            for (int m = 1; m < opt.samples_per_edge; ++m) {
                const double t = static_cast<double>(m) / opt.samples_per_edge;
                probes.push_back((1.0 - t) * sq[k] + t * sq[(k + 1) % 4]);
            }
        // interior lattice in the rotated (u,v) frame of the square
        const int n = opt.interior_grid;
        const Vec2 eu = 0.5 * (sq[2] - sq[3]);
        const Vec2 ev = 0.5 * (sq[1] - sq[2]);
        for (int a = 1; a < n; ++a)
            for (int b = 1; b < n; ++b) {
                const double su = -1.0 + 2.0 * a / n;
                const double sv = -1.0 + 2.0 * b / n;
                probes.push_back(su * eu + sv * ev);
            }
    }

    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opt.rotations; ++r) {
        const double phi = 0.5 * std::numbers::pi * r / opt.rotations;
        const Eigen::Rotation2Dd rot(phi);
        std::array<Vec2, 4> sqr;
        for (int k = 0; k < 4; ++k) sqr[k] = rot * sq[k];
        double d = 0.0;
        for (const Vec2& x : q) d = std::max(d, convex_polygon_distance(x, sqr));
        for (const Vec2& y : probes) {
            d = std::max(d, dist_to_quad(rot * y));
            if (d >= best) break;
        }
        best = std::min(best, d);
    }
    return best;
}

}  // namespace robinquad
