#include "robinquad/mesh.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>

#include <json.hpp>

#include "robinquad/errors.hpp"

namespace robinquad {

namespace {

int lattice_slot(int n, int X, int Y) {
    if (std::abs(X) + std::abs(Y) > n) return -1;
    return (Y + n) * (2 * n + 1) + (X + n);
}

}  // namespace

double Mesh::h() const { return std::sqrt(2.0 * S) / refinement_level; }

int Mesh::node_at(int X, int Y) const {
    const int n = refinement_level;
    const int slot = lattice_slot(n, X, Y);
    if (slot < 0) return -1;
    // nodes are generated row by row; recompute the index from the row layout
    int idx = 0;
    for (int y = -n; y < Y; ++y) idx += 2 * (n - std::abs(y)) + 1;
    return idx + (X + (n - std::abs(Y)));
}

void Mesh::check_split() const {
    if (triangle_half.size() != triangles.size()) throw ContractError("mesh is missing half-domain tags");
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        bool above = false, below = false;
        for (int k : triangles[t]) {
            if (nodes[k].y() > 0.0) above = true;
            if (nodes[k].y() < 0.0) below = true;
        }
        if (above && below) throw ContractError("triangle " + std::to_string(t) + " straddles y = 0");
        const int want = above ? 1 : (below ? 2 : 0);
        if (want != 0 && triangle_half[t] != want)
            throw ContractError("triangle " + std::to_string(t) + " carries the wrong half tag");
    }
}

Mesh build_mesh(int n, double S) {
    if (n < 2) throw DomainError("mesh refinement level must be at least 2");
    if (!(S > 0.0)) throw DomainError("mesh scale S must be positive");
    Mesh m;
    m.refinement_level = n;
    m.S = S;
    const double step = std::sqrt(S) / n;

    std::vector<int> slot_to_node((2 * n + 1) * (2 * n + 1), -1);
    for (int Y = -n; Y <= n; ++Y) {
        const int w = n - std::abs(Y);
        for (int X = -w; X <= w; ++X) {
            slot_to_node[lattice_slot(n, X, Y)] = static_cast<int>(m.nodes.size());
            m.nodes.emplace_back(X * step, Y * step);
            m.lattice.push_back({X, Y});
        }
    }

    auto node = [&](int X, int Y) { return slot_to_node[lattice_slot(n, X, Y)]; };
    auto inside = [&](int X, int Y) { return std::abs(X) + std::abs(Y) <= n; };

    for (int Y = -n; Y < n; ++Y) {
        for (int X = -n; X < n; ++X) {
            std::array<std::array<int, 2>, 3> tri[2];
            if ((X + Y + n) % 2 == 0) {
                tri[0] = {{{X, Y}, {X + 1, Y}, {X + 1, Y + 1}}};
                tri[1] = {{{X, Y}, {X + 1, Y + 1}, {X, Y + 1}}};
            } else {
                tri[0] = {{{X, Y}, {X + 1, Y}, {X, Y + 1}}};
                tri[1] = {{{X + 1, Y}, {X + 1, Y + 1}, {X, Y + 1}}};
            }
            for (const auto& t : tri) {
                bool ok = true;
                double cx = 0.0, cy = 0.0;
                for (const auto& v : t) {
                    ok = ok && inside(v[0], v[1]);
                    cx += v[0] / 3.0;
                    cy += v[1] / 3.0;
                }
                if (!ok || std::abs(cx) + std::abs(cy) >= n) continue;
                m.triangles.push_back({node(t[0][0], t[0][1]), node(t[1][0], t[1][1]), node(t[2][0], t[2][1])});
                m.triangle_half.push_back(cy > 0.0 ? 1 : 2);
            }
        }
    }

    // Boundary edges: edges used by exactly one triangle.
    std::map<std::pair<int, int>, int> uses;
    for (const auto& t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            ++uses[{a, b}];
        }
    for (const auto& t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            if (uses[{std::min(a, b), std::max(a, b)}] != 1) continue;
            const Vec2 mid = 0.5 * (m.nodes[a] + m.nodes[b]);
            EdgeId e;
            e.j = mid.y() > 0.0 ? 1 : 2;
            e.i = mid.x() < 0.0 ? 1 : 2;
            m.boundary_edges.push_back({a, b, e});
        }
    return m;
}

namespace {

template <class F>
std::vector<int> lattice_permutation(const Mesh& m, F&& image) {
    std::vector<int> perm(m.nodes.size());
    for (std::size_t k = 0; k < m.nodes.size(); ++k) {
        const auto [X, Y] = image(m.lattice[k][0], m.lattice[k][1]);
        perm[k] = m.node_at(X, Y);
    }
    return perm;
}

}  // namespace

std::vector<int> mirror_x(const Mesh& m) {
    return lattice_permutation(m, [](int X, int Y) { return std::pair{-X, Y}; });
}
std::vector<int> mirror_y(const Mesh& m) {
    return lattice_permutation(m, [](int X, int Y) { return std::pair{X, -Y}; });
}
std::vector<int> mirror_diagonal(const Mesh& m) {
    return lattice_permutation(m, [](int X, int Y) { return std::pair{Y, X}; });
}

void write_mesh_json(std::ostream& os, const Mesh& m) {
    nlohmann::json j;
    j["refinement_level"] = m.refinement_level;
    j["S"] = m.S;
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (const auto& p : m.nodes) nodes.push_back({p.x(), p.y()});
    j["triangles"] = m.triangles;
    auto& be = j["boundary_edges"] = nlohmann::json::array();
    for (const auto& e : m.boundary_edges) be.push_back({{"nodes", {e.a, e.b}}, {"i", e.edge.i}, {"j", e.edge.j}});
    os << j.dump() << '\n';
}

void write_mesh_text(std::ostream& os, const Mesh& m) {
    os.precision(17);
    os << m.nodes.size() << ' ' << m.triangles.size() << ' ' << m.boundary_edges.size() << '\n';
    for (const auto& p : m.nodes) os << p.x() << ' ' << p.y() << '\n';
    for (const auto& t : m.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& e : m.boundary_edges) os << e.a << ' ' << e.b << ' ' << e.edge.i << ' ' << e.edge.j << '\n';
}

}  // namespace robinquad
