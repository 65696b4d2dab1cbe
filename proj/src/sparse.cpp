#include "smaflow/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smaflow/errors.hpp"

namespace smaflow {

void SparseOperator::apply(const double* x, double* y) const {
    for (int i = 0; i < rows; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[col_idx[k]];
        y[i] = s;
    }
}

std::vector<double> SparseOperator::apply(const std::vector<double>& x) const {
    if (x.size() != static_cast<size_t>(cols))
        throw std::invalid_argument("SparseOperator::apply: size mismatch");
    std::vector<double> y(rows);
    apply(x.data(), y.data());
    return y;
}

double SparseOperator::diag(int i) const { return get(i, i); }

double SparseOperator::get(int i, int j) const {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (col_idx[k] == j) return vals[k];
    return 0.0;
}

namespace {

// Build the CSR pattern for a given connectivity (node-node within elements),
// entries sorted by column within each row. dofs_per_node lets the vector
// assembly reuse it with interleaved (x,y) unknowns.
SparseOperator make_pattern(const Mesh& mesh, int dofs_per_node) {
    const int n = mesh.n_nodes() * dofs_per_node;
    std::vector<std::vector<int>> adj(mesh.n_nodes());
    for (int t = 0; t < mesh.n_triangles(); ++t)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) adj[mesh.triangles[t][a]].push_back(mesh.triangles[t][b]);
    SparseOperator A;
    A.rows = A.cols = n;
    A.symmetric = true;
    A.row_ptr.assign(n + 1, 0);
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        auto& nb = adj[i];
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        for (int d = 0; d < dofs_per_node; ++d)
            A.row_ptr[i * dofs_per_node + d + 1] = static_cast<int>(nb.size()) * dofs_per_node;
    }
    for (int i = 0; i < n; ++i) A.row_ptr[i + 1] += A.row_ptr[i];
    A.col_idx.resize(A.row_ptr[n]);
    A.vals.assign(A.row_ptr[n], 0.0);
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        for (int d = 0; d < dofs_per_node; ++d) {
            int k = A.row_ptr[i * dofs_per_node + d];
            for (int j : adj[i])
                for (int e = 0; e < dofs_per_node; ++e) A.col_idx[k++] = j * dofs_per_node + e;
        }
    }
    return A;
}

void add_entry(SparseOperator& A, int i, int j, double v) {
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
        if (A.col_idx[k] == j) {
            A.vals[k] += v;
            return;
        }
    }
    throw std::logic_error("sparse assembly: entry outside pattern");
}

}  // namespace

SparseOperator assemble_mass(const Mesh& mesh, bool lumped) {
    SparseOperator M = make_pattern(mesh, 1);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double A = mesh.area[t];
        if (lumped) {
            for (int a = 0; a < 3; ++a) add_entry(M, tri[a], tri[a], A / 3.0);
        } else {
            // consistent P1 mass: A/6 diagonal, A/12 off-diagonal
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    add_entry(M, tri[a], tri[b], a == b ? A / 6.0 : A / 12.0);
        }
    }
    return M;
}

SparseOperator assemble_stiffness(const Mesh& mesh, const std::vector<SymTensor>& coeff) {
    if (coeff.size() != 1 && coeff.size() != static_cast<size_t>(mesh.n_triangles()))
        throw std::invalid_argument("assemble_stiffness: coefficient size must be 1 or n_triangles");
    for (const auto& C : coeff) {
        if (!(C.xx > 0.0) || !(C.yy > 0.0) || !(C.xx * C.yy - C.xy * C.xy > 0.0))
            throw ConfigError("assemble_stiffness: coefficient tensor not SPD");
    }
    SparseOperator K = make_pattern(mesh, 1);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const SymTensor& C = coeff.size() == 1 ? coeff[0] : coeff[t];
        const double A = mesh.area[t];
        for (int a = 0; a < 3; ++a) {
            const Vec2 ga = mesh.grads[t][a];
            const Vec2 Cga{C.xx * ga.x + C.xy * ga.y, C.xy * ga.x + C.yy * ga.y};
            for (int b = 0; b < 3; ++b) {
                const Vec2 gb = mesh.grads[t][b];
                add_entry(K, tri[a], tri[b], A * (Cga.x * gb.x + Cga.y * gb.y));
            }
        }
    }
    return K;
}

std::vector<double> solve_spd(const SparseOperator& A, const std::vector<double>& b, double tol,
                              int max_iters, const std::vector<double>* x0) {
    const int n = A.rows;
    if (b.size() != static_cast<size_t>(n)) throw std::invalid_argument("solve_spd: rhs size mismatch");
    if (max_iters < 0) max_iters = 10 * n;

    std::vector<double> x = x0 ? *x0 : std::vector<double>(n, 0.0);
    std::vector<double> r(n), z(n), p(n), Ap(n), dinv(n);
    for (int i = 0; i < n; ++i) {
        const double d = A.diag(i);
        dinv[i] = d > 0.0 ? 1.0 / d : 1.0;
    }

    A.apply(x.data(), Ap.data());
    double bnorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        r[i] = b[i] - Ap[i];
        bnorm2 += b[i] * b[i];
    }
    const double stop2 = tol * tol * bnorm2;
    double rnorm2 = 0.0;
    for (int i = 0; i < n; ++i) rnorm2 += r[i] * r[i];
    if (bnorm2 == 0.0) return std::vector<double>(n, 0.0);
    if (rnorm2 <= stop2) return x;

    double rz = 0.0;
    for (int i = 0; i < n; ++i) {
        z[i] = dinv[i] * r[i];
        rz += r[i] * z[i];
    }
    p = z;

    for (int it = 0; it < max_iters; ++it) {
        A.apply(p.data(), Ap.data());
        double pAp = 0.0;
        for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (pAp <= 0.0)
            throw SolverError("solve_spd: operator not positive definite", std::sqrt(rnorm2), it);
        const double alpha = rz / pAp;
        rnorm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
            rnorm2 += r[i] * r[i];
        }
        if (rnorm2 <= stop2) return x;
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) {
            z[i] = dinv[i] * r[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw SolverError("solve_spd: max iterations exceeded", std::sqrt(rnorm2 / bnorm2), max_iters);
}

}  // namespace smaflow
