#include "smaflow/mesh.hpp"

#include <ostream>
#include <stdexcept>

#include "smaflow/errors.hpp"

namespace smaflow {

Mesh build_rect_mesh(int nx, int ny, double Lx, double Ly) {
    if (nx < 1 || ny < 1) throw ConfigError("build_rect_mesh: nx, ny must be >= 1");
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw ConfigError("build_rect_mesh: Lx, Ly must be > 0");

    Mesh mesh;
    mesh.nx = nx;
    mesh.ny = ny;
    mesh.Lx = Lx;
    mesh.Ly = Ly;

    const int nnx = nx + 1, nny = ny + 1;
    mesh.nodes.resize(static_cast<size_t>(nnx) * nny);
    mesh.on_boundary.assign(mesh.nodes.size(), 0);
    for (int j = 0; j < nny; ++j) {
        for (int i = 0; i < nnx; ++i) {
            const int id = j * nnx + i;
            mesh.nodes[id] = Vec2{i * (Lx / nx), j * (Ly / ny)};
            if (i == 0 || i == nx || j == 0 || j == ny) mesh.on_boundary[id] = 1;
        }
    }

    mesh.triangles.reserve(static_cast<size_t>(nx) * ny * 2);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int n00 = j * nnx + i;
            const int n10 = n00 + 1;
            const int n01 = n00 + nnx;
            const int n11 = n01 + 1;
            // split along the main diagonal n00-n11, both CCW
            mesh.triangles.push_back({n00, n10, n11});
            mesh.triangles.push_back({n00, n11, n01});
        }
    }

    mesh.area.resize(mesh.triangles.size());
    mesh.grads.resize(mesh.triangles.size());
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2 a = mesh.nodes[tri[0]], b = mesh.nodes[tri[1]], c = mesh.nodes[tri[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        mesh.area[t] = 0.5 * det;
        // P1 gradients: grad phi_0 = (y1-y2, x2-x1)/det etc.; the third one is
        // formed as the negated sum so the row sums vanish exactly in floats.
        mesh.grads[t][0] = Vec2{(b.y - c.y) / det, (c.x - b.x) / det};
        mesh.grads[t][1] = Vec2{(c.y - a.y) / det, (a.x - c.x) / det};
        mesh.grads[t][2] = Vec2{-(mesh.grads[t][0].x + mesh.grads[t][1].x),
                                -(mesh.grads[t][0].y + mesh.grads[t][1].y)};
    }
    return mesh;
}

std::vector<SymTensor> element_strain(const Mesh& mesh, const std::vector<double>& u) {
    if (u.size() != static_cast<size_t>(2 * mesh.n_nodes()))
        throw std::invalid_argument("element_strain: displacement size mismatch");
    std::vector<SymTensor> strain(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        double exx = 0.0, eyy = 0.0, exy = 0.0;
        for (int k = 0; k < 3; ++k) {
            const int n = mesh.triangles[t][k];
            const Vec2 g = mesh.grads[t][k];
            const double ux = u[2 * n], uy = u[2 * n + 1];
            exx += g.x * ux;
            eyy += g.y * uy;
            exy += 0.5 * (g.y * ux + g.x * uy);
        }
        strain[t] = SymTensor{exx, exy, eyy};
    }
    return strain;
}

std::vector<double> node_weights(const Mesh& mesh) {
    std::vector<double> w(mesh.n_nodes(), 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double third = mesh.area[t] / 3.0;
        for (int k = 0; k < 3; ++k) w[mesh.triangles[t][k]] += third;
    }
    return w;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
    out << "# nodes " << mesh.n_nodes() << " triangles " << mesh.n_triangles() << "\n";
    out.precision(17);
    for (const auto& p : mesh.nodes) out << p.x << " " << p.y << "\n";
    for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
}

QuadratureRule QuadratureRule::vertices() {
    QuadratureRule q;
    q.points = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    q.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return q;
}

QuadratureRule QuadratureRule::edge_midpoints() {
    QuadratureRule q;
    q.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    q.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return q;
}

QuadratureRule QuadratureRule::centroid() {
    QuadratureRule q;
    q.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    q.weights = {1.0};
    return q;
}

}  // namespace smaflow
