#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "robinquad/geometry.hpp"

namespace robinquad {

struct BoundaryEdge {
    int a = 0;
    int b = 0;
    EdgeId edge;
};

// Triangulation of the reference square |x| + |y| <= sqrt(S). Nodes sit on the lattice
// (X, Y) sqrt(S)/n with |X| + |Y| <= n; every lattice cell is cut along the diagonal
// chosen by the parity of X + Y + n, which makes the mesh invariant under x -> -x,
// y -> -y and the swap (x, y) -> (y, x). No triangle straddles y = 0.
struct Mesh {
    int refinement_level = 0;
    double S = 1.0;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    std::vector<int> triangle_half;             // 1 = upper (y >= 0), 2 = lower
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<std::array<int, 2>> lattice;    // integer coordinates of each node

    double h() const;  // longest element edge, sqrt(2S)/n
    int node_at(int X, int Y) const;  // -1 if absent

    // Throws ContractError if a triangle straddles y = 0 or its half tag is wrong.
    void check_split() const;
};

Mesh build_mesh(int n, double S = 1.0);

// Permutations of node indices induced by the three reflections of the square.
std::vector<int> mirror_x(const Mesh& m);
std::vector<int> mirror_y(const Mesh& m);
std::vector<int> mirror_diagonal(const Mesh& m);

void write_mesh_json(std::ostream& os, const Mesh& m);
void write_mesh_text(std::ostream& os, const Mesh& m);

}  // namespace robinquad
