#pragma once

#include <vector>

#include "smaflow/constitutive.hpp"
#include "smaflow/mesh.hpp"
#include "smaflow/sparse.hpp"

namespace smaflow {

// Unknowns of one mechanical step: interleaved nodal displacements
// [u0x, u0y, ...] (zero on the whole boundary) and the nodal internal variable.
struct MechState {
    std::vector<double> u;
    std::vector<DevTensor> z;
};

struct MechConfig {
    double tol_outer = 1e-9;   // relative, Gauss-Seidel sweep update
    double tol_z = 1e-11;      // relative, flow stationarity residual
    int max_outer = 60;
    int max_prox_iters = 2000;
    bool backtracking = true;  // fixed step tau = dt/eta_z when false
    double lin_tol = 1e-12;
    int lin_max_iters = -1;
};

struct MechDiagnostics {
    int outer_sweeps = 0;
    int prox_iters = 0;           // total over all sweeps
    double last_update = 0.0;     // final relative sweep update
    double max_flow_residual = 0.0;
    std::vector<double> sweep_updates;
};

// Momentum balance at fixed z and theta, backward Euler in the viscous term:
//   (K_E + K_L/dt) u = M l + <E z - alpha theta I, e(phi)> + (K_L/dt) u_prev
// with u = 0 on the whole boundary. load is interleaved nodal, x0 warm-starts
// the linear solve.
std::vector<double> u_solve(const Mesh& mesh, const MaterialParams& p,
                            const std::vector<double>& u_prev,
                            const std::vector<DevTensor>& z,
                            const std::vector<double>& theta,
                            const std::vector<double>& load, double dt,
                            double lin_tol = 1e-12, int lin_max_iters = -1,
                            const std::vector<double>* x0 = nullptr);

// Minimizes the incremental functional
//   J(z) = sum_i m_i [ rho|z_i - zn_i| + eta_z/(2 dt) |z_i - zn_i|^2
//                      + H1(z_i) + theta_i H2(z_i) ]
//        + sum_T (A_T/3) sum_{i in T} 1/2 E(e_T - z_i):(e_T - z_i)
//        + nu/2 (a^T K1 a + b^T K1 b)
// by proximal gradient steps with exact nodal shrinkage and backtracking; J
// never increases across accepted iterations. warm, if given, is the starting
// iterate (the anchor stays z_prev).
std::vector<DevTensor> z_update(const Mesh& mesh, const MaterialParams& p,
                                const std::vector<double>& u,
                                const std::vector<DevTensor>& z_prev,
                                const std::vector<double>& theta, double dt,
                                const MechConfig& cfg,
                                MechDiagnostics* diag = nullptr,
                                const std::vector<DevTensor>* warm = nullptr);

// Alternates u_solve / z_update until the combined relative update drops
// below tol_outer. Deterministic; throws SolverError on iteration caps.
MechState mech_step(const Mesh& mesh, const MaterialParams& p, const MechState& prev,
                    const std::vector<double>& theta, const std::vector<double>& load,
                    double dt, const MechConfig& cfg, MechDiagnostics* diag = nullptr);

// Per-node distance to the shrinkage fixed point of the discrete flow
// inclusion; zero (up to tolerance) exactly at a converged z_update.
std::vector<double> flow_residual(const Mesh& mesh, const MaterialParams& p,
                                  const std::vector<double>& u,
                                  const std::vector<DevTensor>& z,
                                  const std::vector<DevTensor>& z_prev,
                                  const std::vector<double>& theta, double dt);

// Elasticity-type stiffness for E xi = two_mu_like xi + lambda_like tr(xi) I
// on interleaved vector dofs, Dirichlet rows/columns cleared (diagonal kept).
// Shared by u_solve and the tests' monolithic oracle.
SparseOperator assemble_vector_stiffness(const Mesh& mesh, double two_mu_like,
                                         double lambda_like, bool apply_dirichlet);

}  // namespace smaflow
