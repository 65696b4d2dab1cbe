#pragma once

#include <vector>

#include "smaflow/audit.hpp"
#include "smaflow/config.hpp"
#include "smaflow/mech.hpp"
#include "smaflow/thermal.hpp"

namespace smaflow {

struct CoupledState {
    MechState mech;
    std::vector<double> vartheta;
    double t = 0.0;
};

struct CouplerConfig {
    double tol_couple = 1e-9;  // relative, L2 on vartheta
    int max_fp_iters = 60;
    double omega = 1.0;        // relaxation in (0, 1]
    double dt = 0.005;
    double t_end = 1.0;
};

struct StepResult {
    CoupledState state;
    int iterations = 0;
    std::vector<double> f;           // final heat source
    std::vector<double> theta_used;  // temperature the converged pass solved with
    MechDiagnostics mech_diag;
    double conservation_defect = 0.0;
};

// One step of the fixed-point map: v~ -> theta = zeta(v~) -> mechanics ->
// heat source -> enthalpy -> v. Iterates with relaxation omega until
// ||v^(k) - v^(k-1)||_L2 <= tol * max(||v^(k)||_L2, 1); the count is the
// number of map evaluations. Positivity of the accepted enthalpy is a hard
// postcondition (SolverError, never clamping).
StepResult coupled_step(const Mesh& mesh, const MaterialParams& p, const CoupledState& state_n,
                        const std::vector<double>& load_next, const CouplerConfig& ccfg,
                        const MechConfig& mcfg, const ThermalConfig& tcfg);

struct RunResult {
    CoupledState final_state;
    AuditLedger ledger;
};

// Marches the scenario to t_end, fills the ledger row by row, and (when an
// output directory is configured) writes the mesh, time series, and snapshots.
RunResult run(const SimConfig& cfg);

// 0-D material-point driver. The strain path is sampled at the time nodes
// (piecewise linear in between); stress is E(e - z) + alpha theta I with no
// viscous term in 0-D. Adiabatic mode integrates the enthalpy pointwise with
// theta frozen at zeta(vartheta^n) within each step.
struct MaterialPointResult {
    std::vector<double> t;
    std::vector<SymTensor> strain;
    std::vector<DevTensor> z;
    std::vector<SymTensor> stress;
    std::vector<double> theta;
    std::vector<double> vartheta;
    std::vector<double> D_cum;
    double loop_area = 0.0;        // last cycle, trapezoid rule on sigma : de
    double loop_dissipation = 0.0; // last cycle, recorded Psi + M terms
};

MaterialPointResult material_point_run(const MaterialParams& p, const MaterialPointConfig& path,
                                       double dt, double t_end);

}  // namespace smaflow
