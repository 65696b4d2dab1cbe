#include "smaflow/audit.hpp"

#include <cmath>
#include <stdexcept>

#include "smaflow/sparse.hpp"

namespace smaflow {

namespace {

// exact per-element value of nu/2 |grad z|^2 summed over the mesh (P1 fields
// have constant gradients, so no quadrature error)
double nu_gradient_energy(const Mesh& mesh, const MaterialParams& p,
                          const std::vector<DevTensor>& z) {
    if (p.nu == 0.0) return 0.0;
    double E = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        Vec2 ga{0.0, 0.0}, gb{0.0, 0.0};
        for (int k = 0; k < 3; ++k) {
            const DevTensor zi = z[mesh.triangles[t][k]];
            const Vec2 g = mesh.grads[t][k];
            ga.x += g.x * zi.a;
            ga.y += g.y * zi.a;
            gb.x += g.x * zi.b;
            gb.y += g.y * zi.b;
        }
        E += mesh.area[t] * (ga.x * ga.x + ga.y * ga.y + gb.x * gb.x + gb.y * gb.y);
    }
    return 0.5 * p.nu * E;
}

double nodal_hardening_energy(const Mesh& mesh, const MaterialParams& p,
                              const std::vector<DevTensor>& z) {
    const std::vector<double> m = node_weights(mesh);
    double E = 0.0;
    for (int i = 0; i < mesh.n_nodes(); ++i) E += m[i] * hardening_H1(p, z[i]).value;
    return E;
}

double enthalpy_integral(const Mesh& mesh, const std::vector<double>& vartheta) {
    const std::vector<double> m = node_weights(mesh);
    long double s = 0.0L;
    for (int i = 0; i < mesh.n_nodes(); ++i) s += (long double)m[i] * vartheta[i];
    return (double)s;
}

}  // namespace

InternalEnergy internal_energy(const Mesh& mesh, const MaterialParams& p,
                               const std::vector<double>& u, const std::vector<DevTensor>& z,
                               const std::vector<double>& vartheta) {
    const std::vector<SymTensor> strain = element_strain(mesh, u);
    InternalEnergy E;
    // edge-midpoint rule is exact for the quadratic elastic density with P1 z
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double w = mesh.area[t] / 3.0;
        for (int k = 0; k < 3; ++k) {
            const DevTensor zm = 0.5 * (z[tri[k]] + z[tri[(k + 1) % 3]]);
            const SymTensor d = strain[t] - zm.as_sym();
            E.mech += w * 0.5 * ddot(elastic_apply(p, d), d);
        }
    }
    E.mech += nu_gradient_energy(mesh, p, z) + nodal_hardening_energy(mesh, p, z);
    E.th = enthalpy_integral(mesh, vartheta);
    E.total = E.mech + E.th;
    return E;
}

InternalEnergy solver_energy(const Mesh& mesh, const MaterialParams& p,
                             const std::vector<double>& u, const std::vector<DevTensor>& z,
                             const std::vector<double>& vartheta) {
    const std::vector<SymTensor> strain = element_strain(mesh, u);
    InternalEnergy E;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double w = mesh.area[t] / 3.0;
        for (int k = 0; k < 3; ++k) {
            const SymTensor d = strain[t] - z[tri[k]].as_sym();
            E.mech += w * 0.5 * ddot(elastic_apply(p, d), d);
        }
    }
    E.mech += nu_gradient_energy(mesh, p, z) + nodal_hardening_energy(mesh, p, z);
    E.th = enthalpy_integral(mesh, vartheta);
    E.total = E.mech + E.th;
    return E;
}

double energy_residual(const AuditRow& prev, const AuditRow& cur) {
    return (cur.E_mech + cur.E_th) - (prev.E_mech + prev.E_th) - (cur.W_ext - prev.W_ext);
}

double total_entropy(const Mesh& mesh, const MaterialParams& p, const std::vector<double>& u,
                     const std::vector<DevTensor>& z, const std::vector<double>& theta) {
    const std::vector<double> m = node_weights(mesh);
    const std::vector<SymTensor> strain = element_strain(mesh, u);
    double S = 0.0;
    for (int i = 0; i < mesh.n_nodes(); ++i)
        S += m[i] * (entropy_coefficient(p, theta[i]) - hardening_H2(p, z[i]).value);
    for (int t = 0; t < mesh.n_triangles(); ++t) S -= p.alpha * mesh.area[t] * strain[t].trace();
    return S;
}

double entropy_production(const Mesh& mesh, const MaterialParams& p,
                          const SparseOperator& K_thermal,
                          const std::vector<double>& vartheta_new,
                          const std::vector<double>& theta_new,
                          const std::vector<SymTensor>& edot, const std::vector<DevTensor>& zdot) {
    const int nn = mesh.n_nodes();
    for (int i = 0; i < nn; ++i)
        if (!(theta_new[i] > 0.0))
            throw std::domain_error("entropy_production: needs min theta > 0");

    // conduction part as a sum over matrix edges; every summand is >= 0
    // because vartheta and theta are co-monotone and the off-diagonal
    // stiffness entries are nonpositive on this mesh family
    double P = 0.0;
    for (int i = 0; i < nn; ++i) {
        for (int k = K_thermal.row_ptr[i]; k < K_thermal.row_ptr[i + 1]; ++k) {
            const int j = K_thermal.col_idx[k];
            if (j <= i) continue;
            const double term = (-K_thermal.vals[k]) * (vartheta_new[i] - vartheta_new[j]) *
                                (1.0 / theta_new[j] - 1.0 / theta_new[i]);
            P += term;
        }
    }

    // dissipation part xi/theta with node-averaged viscous rates
    const std::vector<double> m = node_weights(mesh);
    std::vector<double> visc(nn, 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double w = mesh.area[t] / 3.0;
        const double vq = ddot(edot[t], edot[t]);
        for (int k = 0; k < 3; ++k) visc[mesh.triangles[t][k]] += w * vq;
    }
    for (int i = 0; i < nn; ++i) {
        const double vz = zdot[i].norm();
        const double xi = p.eta_u * visc[i] / m[i] + p.eta_z * vz * vz + p.rho * vz;
        P += m[i] * xi / theta_new[i];
    }
    return P;
}

double enthalpy_floor(const MaterialParams& p, double dt,
                      const std::vector<double>& znorm_inf_history) {
    double expo = 0.0;
    double sup = 0.0;
    for (double zn : znorm_inf_history) {
        sup = std::max(sup, zn);
        const double Cz = p.c1_hat + 2.0 * p.c2_hat * (1.0 + sup);
        const double C = 9.0 * p.alpha * p.alpha / (2.0 * p.eta_u) + Cz * Cz / p.eta_z;
        expo += dt * (C + Cz * Cz / p.eta_z * zn * zn);
    }
    return p.vartheta_bar * std::exp(-(p.beta1 / p.cc) * expo);
}

MonitorReport global_monitor(const AuditLedger& ledger, const MaterialParams& p,
                             double kappa_factor) {
    MonitorReport rep;
    if (ledger.rows.empty()) return rep;
    rep.M.reserve(ledger.rows.size());
    for (const auto& row : ledger.rows) {
        const double M = row.u_H1_sq + row.z_H1_sq + row.vartheta_L1;
        rep.M.push_back(M);
        rep.max_M = std::max(rep.max_M, M);
        const double lhs = std::pow(row.theta_Lbeta1, p.beta1);
        const double rhs = (p.beta1 / p.cc) * row.vartheta_L1;
        if (lhs > rhs * (1.0 + 1e-12) + 1e-300) rep.theta_bound_ok = false;
    }
    rep.bound = kappa_factor * std::max(rep.M.front(), 1.0);
    rep.flagged = rep.max_M > rep.bound;
    return rep;
}

}  // namespace smaflow
