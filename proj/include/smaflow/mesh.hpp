#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "smaflow/tensor.hpp"

namespace smaflow {

// Structured triangulation of a rectangle: (nx+1)*(ny+1) nodes, every cell
// split along its main diagonal into two counter-clockwise triangles.
struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<char> on_boundary;
    std::vector<double> area;
    // P1 shape-function gradients per triangle; grad[t][2] is assembled as
    // -(grad[t][0] + grad[t][1]) so the three gradients sum to zero exactly.
    std::vector<std::array<Vec2, 3>> grads;
    int nx = 0, ny = 0;
    double Lx = 0.0, Ly = 0.0;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
};

Mesh build_rect_mesh(int nx, int ny, double Lx, double Ly);

// Piecewise-constant symmetric strain of an interleaved displacement field
// [u0x, u0y, u1x, u1y, ...], one tensor per triangle.
std::vector<SymTensor> element_strain(const Mesh& mesh, const std::vector<double>& u);

// Vertex-rule node weights m_i = sum over adjacent triangles of area/3.
std::vector<double> node_weights(const Mesh& mesh);

// Plain-text export: "# nodes <n> triangles <m>", node coordinates, triangles.
void write_mesh(const Mesh& mesh, std::ostream& out);

// Barycentric quadrature on the reference triangle; weights sum to 1 and are
// applied as area * sum_k w_k f(x_k).
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;

    static QuadratureRule vertices();
    static QuadratureRule edge_midpoints();  // exact for quadratics
    static QuadratureRule centroid();
};

}  // namespace smaflow
