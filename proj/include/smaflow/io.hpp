#pragma once

#include <string>

#include "smaflow/audit.hpp"
#include "smaflow/coupler.hpp"
#include "smaflow/mesh.hpp"

namespace smaflow {

// CSV with the fixed header
//   t,E_mech,E_th,W_ext,D_cum,entropy,entropy_prod,min_theta,max_theta,coupler_iters,energy_residual,phi_floor
// 17 significant digits, LF line endings.
void write_timeseries(const AuditLedger& ledger, const std::string& path);

// "# nodes <n> triangles <m>" then one line per node: u_x u_y z_a z_b vartheta.
void write_snapshot(const Mesh& mesh, const CoupledState& state, const std::string& path);

void write_mesh_file(const Mesh& mesh, const std::string& path);

// Readers for the audit subcommand; only the CSV columns are recovered.
AuditLedger read_timeseries(const std::string& path);

struct SnapshotData {
    int n_nodes = 0;
    int n_triangles = 0;
    std::vector<double> u;  // interleaved
    std::vector<DevTensor> z;
    std::vector<double> vartheta;
};

SnapshotData read_snapshot(const std::string& path);

}  // namespace smaflow
