#pragma once

#include <vector>

#include "smaflow/constitutive.hpp"
#include "smaflow/mesh.hpp"
#include "smaflow/sparse.hpp"

namespace smaflow {

struct ThermalConfig {
    double lin_tol = 1e-14;  // tight so discrete conservation holds to 1e-12*scale
    int max_iters = -1;
    bool lumped_mass = true;
};

// Nodal heat source
//   f_i = eta_u <|e(du/dt)|^2>_i
//       + theta_i (alpha <tr e(du/dt)>_i + DH2(z_i) : zdot_i)
//       + rho |zdot_i| + eta_z |zdot_i|^2
// where <.>_i is the area-weighted average of the per-element rate quantity
// over the triangles touching node i; with these weights the nodal source
// reproduces the element-level viscous and thermal-expansion work exactly.
std::vector<double> heat_source(const Mesh& mesh, const MaterialParams& p,
                                const std::vector<SymTensor>& edot,
                                const std::vector<double>& theta,
                                const std::vector<DevTensor>& z_new,
                                const std::vector<DevTensor>& zdot);

// One backward-Euler step of the insulated enthalpy equation:
//   (M/dt + K) v = M (v_prev/dt + f),   K from kappa_elem.
// Conservation sum_i m_i v_i = sum_i m_i (v_prev_i + dt f_i) holds to solver
// precision because K annihilates constants by construction.
std::vector<double> thermal_step(const Mesh& mesh, const std::vector<double>& vartheta_prev,
                                 const std::vector<SymTensor>& kappa_elem,
                                 const std::vector<double>& f, double dt,
                                 const ThermalConfig& cfg);

// Checks the trajectory against the parabolic energy estimate
//   ||v(t_n)||^2 + 2 c_kappa sum_{k<=n} dt ||grad v^k||^2
//     <= e^{t_n} (||v^0||^2 + sum_k dt ||f^k||^2)
// with the full-horizon source norm on the right.
struct EnergyEstimateReport {
    struct Row {
        double t = 0.0;
        double lhs = 0.0;
        double rhs = 0.0;
        bool ok = true;
    };
    std::vector<Row> rows;
    bool all_ok = true;
};

EnergyEstimateReport energy_estimate_check(const Mesh& mesh,
                                           const std::vector<std::vector<double>>& vartheta_traj,
                                           const std::vector<std::vector<double>>& f_traj,
                                           double dt, double c_kappa, bool lumped_mass,
                                           double rel_slack = 1e-10);

}  // namespace smaflow
