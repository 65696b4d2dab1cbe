#pragma once

#include <vector>

#include "smaflow/constitutive.hpp"
#include "smaflow/mech.hpp"
#include "smaflow/mesh.hpp"

namespace smaflow {

// One thermodynamic bookkeeping row. The first twelve fields are the CSV
// columns, in serialization order; the fields after them are in-memory
// diagnostics used by the monitors and tests.
struct AuditRow {
    double t = 0.0;
    double E_mech = 0.0;
    double E_th = 0.0;
    double W_ext = 0.0;
    double D_cum = 0.0;
    double entropy = 0.0;
    double entropy_prod = 0.0;
    double min_theta = 0.0;
    double max_theta = 0.0;
    int coupler_iters = 0;
    double energy_residual = 0.0;
    double phi_floor = 0.0;

    double min_vartheta = 0.0;
    double conservation_defect = 0.0;
    double u_H1_sq = 0.0;
    double z_H1_sq = 0.0;
    double vartheta_L1 = 0.0;
    double theta_Lbeta1 = 0.0;  // ||theta||_{L^beta1}
    double znorm_inf = 0.0;
};

struct AuditLedger {
    std::vector<AuditRow> rows;
};

struct InternalEnergy {
    double mech = 0.0;
    double th = 0.0;
    double total = 0.0;
};

// E_mech = integral of W1 with element-exact quadrature for the quadratic
// elastic term (P1 z), nodal quadrature for H1; E_th = integral of vartheta.
InternalEnergy internal_energy(const Mesh& mesh, const MaterialParams& p,
                               const std::vector<double>& u,
                               const std::vector<DevTensor>& z,
                               const std::vector<double>& vartheta);

// Same energy with the solvers' vertex-rule quadrature for the z-quadratic
// term, so that step residuals telescope against the discrete equations.
InternalEnergy solver_energy(const Mesh& mesh, const MaterialParams& p,
                             const std::vector<double>& u,
                             const std::vector<DevTensor>& z,
                             const std::vector<double>& vartheta);

// R = (E_mech + E_th)(n+1) - (E_mech + E_th)(n) - (W_ext(n+1) - W_ext(n)).
double energy_residual(const AuditRow& prev, const AuditRow& cur);

// Entropy density integral: sum_i m_i S(theta_i) - alpha sum_T A_T tr e_T
//                           - sum_i m_i H2(z_i).
double total_entropy(const Mesh& mesh, const MaterialParams& p,
                     const std::vector<double>& u,
                     const std::vector<DevTensor>& z,
                     const std::vector<double>& theta);

// Production over one accepted step, nonnegative term by term:
//   P = sum_{i<j} (-K_ij)(vartheta_i - vartheta_j)(1/theta_j - 1/theta_i)
//     + sum_i m_i (eta_u <|edot|^2>_i + eta_z |zdot_i|^2 + rho |zdot_i|) / theta_i
// (the edge form is the discrete integral kappa^c grad(vartheta).grad(1/theta),
// with vartheta and theta co-monotone and K an M-matrix on this mesh family).
double entropy_production(const Mesh& mesh, const MaterialParams& p,
                          const SparseOperator& K_thermal,
                          const std::vector<double>& vartheta_new,
                          const std::vector<double>& theta_new,
                          const std::vector<SymTensor>& edot,
                          const std::vector<DevTensor>& zdot);

// Stampacchia-type enthalpy floor
//   phi(t_n) = vartheta_bar * exp(-(beta1/c^c) * sum_{k<n} dt_k (C_k + (Cz_k)^2/eta_z * |z^k|_inf^2))
// integrated by the left-endpoint rule, with Cz_k = c1_hat + 2 c2_hat (1 + running sup |z|)
// and C_k = (3 alpha)^2 / (2 eta_u) + (Cz_k)^2 / eta_z.
double enthalpy_floor(const MaterialParams& p, double dt,
                      const std::vector<double>& znorm_inf_history);

// Boundedness monitor M(t) = |u|_{H1}^2 + |z|_{H1}^2 + |vartheta|_{L1} and the
// temperature bound ||theta||_{L^beta1}^beta1 <= (beta1/c^c) ||vartheta||_{L1}.
struct MonitorReport {
    double bound = 0.0;  // kappa_factor * max(M(0), 1)
    double max_M = 0.0;
    bool flagged = false;           // some M(t) above the bound
    bool theta_bound_ok = true;     // integrated zeta bound at every row
    std::vector<double> M;
};

MonitorReport global_monitor(const AuditLedger& ledger, const MaterialParams& p,
                             double kappa_factor = 50.0);

}  // namespace smaflow
