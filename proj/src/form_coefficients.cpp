#include "robinquad/form_coefficients.hpp"

#include <cmath>

namespace robinquad {

namespace {

// Second-order Taylor data in the local variables (a_j, c, S_j) of one half.
struct Local {
    double v = 0.0;
    Eigen::Vector3d d = Eigen::Vector3d::Zero();
    Eigen::Matrix3d dd = Eigen::Matrix3d::Zero();
};

enum { A = 0, C = 1, SJ = 2 };

Local operator*(const Local& f, const Local& g) {
    Local r;
    r.v = f.v * g.v;
    r.d = f.d * g.v + f.v * g.d;
    r.dd = f.dd * g.v + f.d * g.d.transpose() + g.d * f.d.transpose() + f.v * g.dd;
    return r;
}

Local operator*(double s, Local f) {
    f.v *= s;
    f.d *= s;
    f.dd *= s;
    return f;
}

// w_j = S_j / S, the Jacobian of L on half j
Local jacobian_weight(double Sj, double S) {
    Local w;
    w.v = Sj / S;
    w.d(SJ) = 1.0 / S;
    return w;
}

// Entries of (D L^-1)(D L^-1)^T on half j. sigma = +1 upper, -1 lower.
struct Metric {
    Local g11, g12, g22;
};

Metric metric(double a, double c, double Sj, double S, double sigma) {
    const double c02 = S;  // c0^2
    Metric m;
    // g11 = c0^2/c^2 + a^2 c0^2 / Sj^2
    m.g11.v = c02 / (c * c) + a * a * c02 / (Sj * Sj);
    m.g11.d << 2.0 * a * c02 / (Sj * Sj), -2.0 * c02 / (c * c * c), -2.0 * a * a * c02 / (Sj * Sj * Sj);
    m.g11.dd << 2.0 * c02 / (Sj * Sj), 0.0, -4.0 * a * c02 / std::pow(Sj, 3),
                0.0, 6.0 * c02 / std::pow(c, 4), 0.0,
                -4.0 * a * c02 / std::pow(Sj, 3), 0.0, 6.0 * a * a * c02 / std::pow(Sj, 4);
    // g12 = -sigma a c S / Sj^2
    const double k = -sigma * S;
    m.g12.v = k * a * c / (Sj * Sj);
    m.g12.d << k * c / (Sj * Sj), k * a / (Sj * Sj), -2.0 * k * a * c / std::pow(Sj, 3);
    m.g12.dd << 0.0, k / (Sj * Sj), -2.0 * k * c / std::pow(Sj, 3),
                k / (Sj * Sj), 0.0, -2.0 * k * a / std::pow(Sj, 3),
                -2.0 * k * c / std::pow(Sj, 3), -2.0 * k * a / std::pow(Sj, 3), 6.0 * k * a * c / std::pow(Sj, 4);
    // g22 = c^2 S^2 / (c0^2 Sj^2) = c^2 S / Sj^2
    m.g22.v = c * c * S / (Sj * Sj);
    m.g22.d << 0.0, 2.0 * c * S / (Sj * Sj), -2.0 * c * c * S / std::pow(Sj, 3);
    m.g22.dd << 0.0, 0.0, 0.0,
                0.0, 2.0 * S / (Sj * Sj), -4.0 * c * S / std::pow(Sj, 3),
                0.0, -4.0 * c * S / std::pow(Sj, 3), 6.0 * c * c * S / std::pow(Sj, 4);
    return m;
}

// |Gamma(i,j)| = sqrt(Sj^2/c^2 + (a + e c)^2), e = +1 for i = 1, -1 for i = 2
Local edge_length_local(double a, double c, double Sj, double e) {
    const double d = a + e * c;
    const double Q = Sj * Sj / (c * c) + d * d;
    Eigen::Vector3d Qd(2.0 * d, -2.0 * Sj * Sj / std::pow(c, 3) + 2.0 * e * d, 2.0 * Sj / (c * c));
    Eigen::Matrix3d Qdd;
    Qdd << 2.0, 2.0 * e, 0.0,
           2.0 * e, 6.0 * Sj * Sj / std::pow(c, 4) + 2.0, -4.0 * Sj / std::pow(c, 3),
           0.0, -4.0 * Sj / std::pow(c, 3), 2.0 / (c * c);
    Local g;
    g.v = std::sqrt(Q);
    g.d = Qd / (2.0 * g.v);
    g.dd = Qdd / (2.0 * g.v) - Qd * Qd.transpose() / (4.0 * g.v * g.v * g.v);
    return g;
}

Local inverse_area(double Sj) {
    Local r;
    r.v = 1.0 / Sj;
    r.d(SJ) = -1.0 / (Sj * Sj);
    r.dd(SJ, SJ) = 2.0 / std::pow(Sj, 3);
    return r;
}

// Lift local data of half j into the global variables (a1, a2, c, S1).
struct Global {
    double v = 0.0;
    Eigen::Vector4d d = Eigen::Vector4d::Zero();
    Eigen::Matrix4d dd = Eigen::Matrix4d::Zero();
};

Global lift(const Local& f, int j) {
    const std::array<int, 3> idx{j == 1 ? 0 : 1, 2, 3};
    const std::array<double, 3> fac{1.0, 1.0, j == 1 ? 1.0 : -1.0};  // dS2/dS1 = -1
    Global g;
    g.v = f.v;
    for (int k = 0; k < 3; ++k) {
        g.d(idx[k]) += fac[k] * f.d(k);
        for (int l = 0; l < 3; ++l) g.dd(idx[k], idx[l]) += fac[k] * fac[l] * f.dd(k, l);
    }
    return g;
}

}  // namespace

Mat2 pullback_metric(const QuadParams& p, int j) {
    p.validate();
    const Metric m = metric(p.a(j), p.c, p.area(j), p.S, j == 1 ? 1.0 : -1.0);
    Mat2 g;
    g << m.g11.v, m.g12.v, m.g12.v, m.g22.v;
    return g;
}

FormDerivativeCoefficients form_derivative_coefficients(const QuadParams& p, double alpha, Weighting w) {
    p.validate();
    const double gamma0 = std::sqrt(2.0 * p.S);
    FormDerivativeCoefficients out;
    auto put = [&](auto setter, const Global& g) {
        setter(out.value) = g.v;
        for (int k = 0; k < 4; ++k) {
            setter(out.first[k]) = g.d(k);
            for (int l = 0; l < 4; ++l) setter(out.second[k][l]) = g.dd(k, l);
        }
    };
    for (int j = 1; j <= 2; ++j) {
        const double a = p.a(j);
        const double Sj = p.area(j);
        const int h = j - 1;
        Metric m = metric(a, p.c, Sj, p.S, j == 1 ? 1.0 : -1.0);
        const Local weight = jacobian_weight(Sj, p.S);
        if (w == Weighting::Transported) {
            m.g11 = weight * m.g11;
            m.g12 = weight * m.g12;
            m.g22 = weight * m.g22;
        }
        put([h](FormCoefficients& f) -> double& { return f.interior[h](0, 0); }, lift(m.g11, j));
        put([h](FormCoefficients& f) -> double& { return f.interior[h](0, 1); }, lift(m.g12, j));
        put([h](FormCoefficients& f) -> double& { return f.interior[h](1, 0); }, lift(m.g12, j));
        put([h](FormCoefficients& f) -> double& { return f.interior[h](1, 1); }, lift(m.g22, j));

        Local mass;
        mass.v = 1.0;
        if (w == Weighting::Transported) mass = weight;
        put([h](FormCoefficients& f) -> double& { return f.mass[h]; }, lift(mass, j));

        for (int i = 1; i <= 2; ++i) {
            const EdgeId e{i, j};
            const Local len = edge_length_local(a, p.c, Sj, edge_sign(e));
            // transported: alpha |Gamma| / |Gamma0|; pullback: alpha S |Gamma| / (|Gamma0| Sj)
            const Local coef = w == Weighting::Transported ? (alpha / gamma0) * len
                                                          : (alpha * p.S / gamma0) * (len * inverse_area(Sj));
            const int k = edge_index(e);
            put([k](FormCoefficients& f) -> double& { return f.boundary[k]; }, lift(coef, j));
        }
    }
    return out;
}

FormCoefficients form_coefficients(const QuadParams& p, double alpha, Weighting w) {
    return form_derivative_coefficients(p, alpha, w).value;
}

}  // namespace robinquad
