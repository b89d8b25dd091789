#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace robinquad {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Quadrilateral with vertices (-c,0), (a1, S1/c), (c,0), (a2, -S2/c) and area 2S.
// The upper triangle (y >= 0) has area S1, the lower one S2 = 2S - S1.
struct QuadParams {
    double a1 = 0.0;
    double a2 = 0.0;
    double c = 1.0;
    double S1 = 1.0;
    double S = 1.0;

    static QuadParams square(double S = 1.0);

    double S2() const { return 2.0 * S - S1; }
    double c0() const;
    // j = 1 (upper) or 2 (lower)
    double a(int j) const { return j == 1 ? a1 : a2; }
    double area(int j) const { return j == 1 ? S1 : S2(); }
    double height(int j) const { return area(j) / c; }

    // Throws DomainError unless c > 0, S > 0 and 0 < S1 < 2S (all finite).
    void validate() const;
    bool is_square(double tol = 0.0) const;
    bool is_convex() const;

    bool operator==(const QuadParams&) const = default;
};

// The four geometric parameters that derivatives are taken in.
enum class Param { a1 = 0, a2 = 1, c = 2, S1 = 3 };
inline constexpr std::array<Param, 4> kParams{Param::a1, Param::a2, Param::c, Param::S1};

const char* param_name(Param v);
Param param_from_name(const std::string& name);
double param_value(const QuadParams& p, Param v);
QuadParams with_param(QuadParams p, Param v, double value);

// Edge (i, j): i = 1 joins (-c,0) to the apex of half j, i = 2 joins that apex to (c,0).
// j = 1 is the upper half, j = 2 the lower one.
struct EdgeId {
    int i = 1;
    int j = 1;
    bool operator==(const EdgeId&) const = default;
};
inline constexpr std::array<EdgeId, 4> kEdges{EdgeId{1, 1}, EdgeId{2, 1}, EdgeId{1, 2}, EdgeId{2, 2}};
int edge_index(EdgeId e);
// +1 for i = 1, -1 for i = 2
inline double edge_sign(EdgeId e) { return e.i == 1 ? 1.0 : -1.0; }

// Vertex order follows the parametrisation: left, upper apex, right, lower apex.
std::array<Vec2, 4> quad_vertices(const QuadParams& p);
// Unsigned shoelace area.
double polygon_area(const std::array<Vec2, 4>& pts);
std::pair<Vec2, Vec2> quad_edge(const QuadParams& p, EdgeId e);
std::pair<Vec2, Vec2> reference_edge(EdgeId e, double S);

double edge_length(const QuadParams& p, EdgeId e);
double perimeter(const QuadParams& p);
// Interior angles at the vertices in quad_vertices order, each in (0, 2pi).
std::array<double, 4> interior_angles(const QuadParams& p);

struct PiecewiseLinearMap {
    Mat2 upper;  // used for y >= 0
    Mat2 lower;  // used for y < 0

    Vec2 operator()(const Vec2& x) const { return x.y() >= 0.0 ? Vec2(upper * x) : Vec2(lower * x); }
};

// Reference square -> quadrilateral.
PiecewiseLinearMap map_forward(const QuadParams& p);
// Quadrilateral -> reference square.
PiecewiseLinearMap map_inverse(const QuadParams& p);

using ScalarField = std::function<double(const Vec2&)>;

// Both sides of the change-of-variables identities for the transport u -> u o L.
//   interior: <u o L, v o L>_{Omega0}  vs  (S/S1) <u,v>_{upper} + (S/S2) <u,v>_{lower}
//   edges:    <u,v>_{Gamma(i,j)}       vs  (|Gamma(i,j)|/|Gamma0|) <u o L, v o L>_{Gamma0(i,j)}
struct PullbackCheck {
    double interior_reference = 0.0;
    double interior_physical = 0.0;
    std::array<double, 4> edge_physical{};
    std::array<double, 4> edge_reference{};
};

// order: Gauss-Legendre points per direction; one of 4, 8, 16, 32, 64.
PullbackCheck pullback_inner_products(const QuadParams& p, const ScalarField& u, const ScalarField& v,
                                      int order = 16);

struct HausdorffOptions {
    int rotations = 720;
    int samples_per_edge = 1000;
    int interior_grid = 64;
};

// Distance to the square of the same area after centroid alignment, minimised over a
// grid of rotations in [0, pi/2). Upper bound on the isometry-minimised distance.
double hausdorff_distance_to_square(const QuadParams& p, const HausdorffOptions& opt = {});

}  // namespace robinquad
