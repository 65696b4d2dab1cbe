#pragma once

#include <vector>

#include "smaflow/mesh.hpp"

namespace smaflow {

// Compressed sparse row matrix. Assembly fixes the element loop order, so
// rebuilding from identical inputs is bit-identical.
struct SparseOperator {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;
    std::vector<int> col_idx;
    std::vector<double> vals;
    bool symmetric = false;

    void apply(const double* x, double* y) const;
    std::vector<double> apply(const std::vector<double>& x) const;
    double diag(int i) const;
    // Entry lookup within the existing pattern; zero if absent.
    double get(int i, int j) const;
};

// P1 mass matrix; lumped = row-sum diagonal variant.
SparseOperator assemble_mass(const Mesh& mesh, bool lumped);

// Scalar stiffness integral grad(phi_i) . C grad(phi_j) with a per-element
// SPD coefficient tensor; pass a single entry to use it on every element.
SparseOperator assemble_stiffness(const Mesh& mesh, const std::vector<SymTensor>& coeff);

// Preconditioned conjugate gradients with the diagonal preconditioner, fixed
// iteration order. Stops at ||b - A x|| <= tol * ||b||; throws SolverError
// with the final residual if max_iters (default 10 * rows) is exceeded.
std::vector<double> solve_spd(const SparseOperator& A, const std::vector<double>& b,
                              double tol, int max_iters = -1,
                              const std::vector<double>* x0 = nullptr);

}  // namespace smaflow
