#include "robinquad/certificates.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "robinquad/errors.hpp"
#include "robinquad/square_exact.hpp"

namespace robinquad {

namespace {

constexpr double kMargin = 1e-12;

bool strictly_less(double a, double b) { return b - a > kMargin * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

Certificate make(CertificateKind k, const QuadParams& p, std::optional<double> alpha) {
    Certificate c;
    c.kind = k;
    c.params = p;
    c.alpha = alpha;
    return c;
}

void require_negative(double alpha) {
    if (!(alpha < 0.0) || !std::isfinite(alpha)) throw DomainError("certificates need a finite alpha < 0");
}

// min over c of the perimeter of the quad with a1 = a2 = 0 and halves S1, 2S - S1
double min_perimeter(double S1, double S) {
    const double S2 = 2.0 * S - S1;
    auto f = [&](double c) { return 2.0 * std::hypot(c, S1 / c) + 2.0 * std::hypot(c, S2 / c); };
    const double lo = std::sqrt(std::min(S1, S2));
    const double hi = std::sqrt(std::max(S1, S2));
    if (hi - lo <= 1e-15 * hi) return f(lo);
    const auto r = boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits);
    return r.second;
}

double equilateral_perimeter(double area) { return 3.0 * std::sqrt(4.0 * area / std::sqrt(3.0)); }

}  // namespace

const char* kind_name(CertificateKind k) {
    switch (k) {
        case CertificateKind::SmallAlpha: return "small_alpha";
        case CertificateKind::TrialOne: return "trial_one";
        case CertificateKind::LargeAlphaAsymptotic: return "large_alpha_asymptotic";
        case CertificateKind::ThresholdI: return "threshold_I";
        case CertificateKind::ThresholdII: return "threshold_II";
        case CertificateKind::ThresholdIII: return "threshold_III";
        case CertificateKind::ThresholdIV: return "threshold_IV";
        case CertificateKind::ThresholdV: return "threshold_V";
        case CertificateKind::ThresholdVI: return "threshold_VI";
    }
    return "?";
}

CertificateKind kind_from_name(const std::string& s) {
    for (int k = 0; k <= static_cast<int>(CertificateKind::ThresholdVI); ++k)
        if (s == kind_name(static_cast<CertificateKind>(k))) return static_cast<CertificateKind>(k);
    throw DomainError("unknown certificate kind '" + s + "'");
}

const char* verdict_name(Verdict v) { return v == Verdict::CertifiedLess ? "certified_less" : "inconclusive"; }

Verdict verdict_from_name(const std::string& s) {
    if (s == "certified_less") return Verdict::CertifiedLess;
    if (s == "inconclusive") return Verdict::Inconclusive;
    throw DomainError("unknown verdict '" + s + "'");
}

double l_value(const QuadParams& p) {
    double s = 0.0;
    for (EdgeId e : kEdges) s += edge_length(p, e) / p.area(e.j);
    return s;
}

std::array<double, 3> l_bound_chain(const QuadParams& p) {
    p.validate();
    const double S1 = p.S1, S2 = p.S2(), c = p.c;
    const double b1 = 2.0 * std::sqrt(S1 * S1 / (c * c) + c * c) / S1 + 2.0 * std::sqrt(S2 * S2 / (c * c) + c * c) / S2;
    const double b2 = 2.0 * std::numbers::sqrt2 / std::sqrt(S1) + 2.0 * std::numbers::sqrt2 / std::sqrt(S2);
    const double b3 = 4.0 * std::sqrt(2.0 * p.S) / p.S;
    return {b1, b2, b3};
}

SmallAlphaRatio small_alpha_ratio(const QuadParams& p) {
    p.validate();
    const double S = p.S;
    const double m = perimeter(p) / (4.0 * std::sqrt(2.0 * S));
    double q = S / (2.0 * p.c * p.c);
    for (int j = 1; j <= 2; ++j) q += (p.a(j) * p.a(j) + p.c * p.c) / (4.0 * p.area(j));
    SmallAlphaRatio r;
    r.numerator = m - 1.0;
    r.denominator = q - 1.0;
    if (std::abs(r.denominator) >= 1e-12) r.z = r.numerator / r.denominator;
    return r;
}

double g_alpha(double alpha, double S) {
    require_negative(alpha);
    const SquareSolution sol = solve_square(alpha, S);
    return -sol.grad_norm_sq / (alpha * sol.boundary_norm_sq);
}

Certificate small_alpha_certificate(const QuadParams& p, double alpha) {
    require_negative(alpha);
    Certificate c = make(CertificateKind::SmallAlpha, p, alpha);
    const SmallAlphaRatio r = small_alpha_ratio(p);
    const double g = g_alpha(alpha, p.S);
    c.quantities["l"] = l_value(p);
    c.quantities["perimeter_ratio_minus_1"] = r.numerator;
    c.quantities["metric_mean_minus_1"] = r.denominator;
    c.quantities["g"] = g;
    if (!r.z) {
        c.notes = "z undefined: denominator vanishes at the square";
        return c;
    }
    c.quantities["z"] = *r.z;
    if (strictly_less(g, *r.z)) {
        c.verdict = Verdict::CertifiedLess;
        c.notes = "square eigenfunction transported to the quadrilateral has a lower Rayleigh quotient";
    } else {
        c.notes = "g(alpha) >= z: alpha too large in magnitude for this comparison";
    }
    return c;
}

Certificate trial_one_certificate(const QuadParams& p, double alpha) {
    require_negative(alpha);
    Certificate c = make(CertificateKind::TrialOne, p, alpha);
    const double lambda0 = solve_square(alpha, p.S).lambda1;
    const double P = perimeter(p);
    const double bound = alpha * P / (2.0 * p.S);
    c.quantities["lambda0"] = lambda0;
    c.quantities["perimeter"] = P;
    c.quantities["bound"] = bound;
    c.quantities["l"] = l_value(p);
    if (strictly_less(bound, lambda0)) {
        c.verdict = Verdict::CertifiedLess;
        c.notes = "constant trial function: alpha * perimeter / (2S) < lambda0";
    } else {
        c.notes = "constant trial function bound does not beat lambda0";
    }
    return c;
}

double asymptotic_constant(double theta) {
    if (!(theta > 0.0 && theta < 2.0 * std::numbers::pi)) throw DomainError("angle must lie in (0, 2pi)");
    if (theta >= std::numbers::pi) return 1.0;
    const double s = std::sin(0.5 * theta);
    return 1.0 / (s * s);
}

Certificate large_alpha_certificate(const QuadParams& p) {
    Certificate c = make(CertificateKind::LargeAlphaAsymptotic, p, std::nullopt);
    std::array<double, 4> th{};
    try {
        th = interior_angles(p);
    } catch (const GeometryError& e) {
        c.notes = std::string("degenerate corner: ") + e.what();
        return c;
    }
    double cmax = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double ck = asymptotic_constant(th[k]);
        c.quantities["theta" + std::to_string(k + 1)] = th[k];
        c.quantities["C" + std::to_string(k + 1)] = ck;
        cmax = std::max(cmax, ck);
    }
    c.quantities["max_C"] = cmax;
    c.quantities["square_constant"] = 2.0;
    if (strictly_less(2.0, cmax)) {
        c.verdict = Verdict::CertifiedLess;
        c.notes = "asymptotic as alpha -> -inf: leading constant max C_i exceeds the square's 2";
    } else if (std::all_of(th.begin(), th.end(),
                           [](double x) { return std::abs(x - 0.5 * std::numbers::pi) < 1e-12; })) {
        c.notes = "rectangle: leading constants tie; among rectangles the square is maximal by separation of variables";
    } else {
        c.notes = "leading constant does not exceed the square's";
    }
    return c;
}

Thresholds parameter_thresholds(double alpha, double S) {
    require_negative(alpha);
    if (!(S > 0.0)) throw DomainError("S must be positive");
    Thresholds t;
    t.alpha = alpha;
    t.S = S;
    t.lambda0 = solve_square(alpha, S).lambda1;
    const double P = 2.0 * S * t.lambda0 / alpha;
    t.target_perimeter = P;
    // perimeter >= 2|a_j| + 2c > 2|a_j|
    t.A = 0.5 * P;
    // perimeter >= 4 sqrt(c^2 + S^2/c^2); solve for c^2
    const double K = P * P / 16.0;
    const double disc = std::sqrt(std::max(0.0, K * K - 4.0 * S * S));
    t.c1 = std::sqrt(0.5 * (K + disc));
    t.c2 = std::sqrt(0.5 * (K - disc));
    // perimeter >= min_c perimeter(0, 0, c, S1); decreasing in |S1 - S|. It stays below the
    // equilateral triangle's perimeter, so no threshold exists past that.
    if (P < equilateral_perimeter(2.0 * S)) {
        auto f = [&](double s1) { return min_perimeter(s1, S) - P; };
        const double lo = 1e-12 * S;
        if (f(lo) > 0.0) {
            boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
            std::uintmax_t it = 200;
            const auto r = boost::math::tools::bisect(f, lo, S, tol, it);
            t.S_tilde = r.first;  // lower end: Pmin > P strictly below it
        }
    }
    return t;
}

std::vector<Certificate> threshold_certificates(const QuadParams& p, double alpha) {
    p.validate();
    const Thresholds t = parameter_thresholds(alpha, p.S);
    std::vector<Certificate> out;
    auto add = [&](CertificateKind k, bool fires, const std::string& what) {
        Certificate c = make(k, p, alpha);
        c.quantities["A"] = t.A;
        c.quantities["c1"] = t.c1;
        c.quantities["c2"] = t.c2;
        c.quantities["target_perimeter"] = t.target_perimeter;
        c.quantities["lambda0"] = t.lambda0;
        if (t.S_tilde) c.quantities["S_tilde"] = *t.S_tilde;
        c.verdict = fires ? Verdict::CertifiedLess : Verdict::Inconclusive;
        c.notes = what;
        out.push_back(std::move(c));
    };
    add(CertificateKind::ThresholdI, strictly_less(t.A, std::abs(p.a1)), "|a1| > A");
    add(CertificateKind::ThresholdII, strictly_less(t.A, std::abs(p.a2)), "|a2| > A");
    add(CertificateKind::ThresholdIII, strictly_less(t.c1, p.c), "c > c1");
    add(CertificateKind::ThresholdIV, strictly_less(p.c, t.c2), "c < c2");
    if (t.S_tilde) {
        add(CertificateKind::ThresholdV, strictly_less(p.S1, *t.S_tilde), "S1 < S_tilde");
        add(CertificateKind::ThresholdVI, strictly_less(p.S2(), *t.S_tilde), "2S - S1 < S_tilde");
    } else {
        const std::string why = "no S_tilde: target perimeter exceeds the equilateral triangle's";
        add(CertificateKind::ThresholdV, false, why);
        add(CertificateKind::ThresholdVI, false, why);
    }
    return out;
}

double hausdorff_threshold(double alpha, double S) {
    const Thresholds t = parameter_thresholds(alpha, S);
    // If no condition fires, every vertex lies within rho of the origin, which belongs to
    // both the quad and the square; centring moves the quad by at most rho.
    const double s_tilde = t.S_tilde.value_or(0.0);
    const double height = (2.0 * S - s_tilde) / t.c2;
    const double rho = std::max(t.c1, std::hypot(t.A, height));
    return rho + std::max(rho, std::sqrt(S));
}

std::vector<Certificate> all_certificates(const QuadParams& p, double alpha) {
    std::vector<Certificate> out;
    out.push_back(small_alpha_certificate(p, alpha));
    out.push_back(trial_one_certificate(p, alpha));
    out.push_back(large_alpha_certificate(p));
    for (auto& c : threshold_certificates(p, alpha)) out.push_back(std::move(c));
    return out;
}

}  // namespace robinquad
