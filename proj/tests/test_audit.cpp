#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "smaflow/audit.hpp"
#include "smaflow/sparse.hpp"

using namespace smaflow;

TEST_CASE("internal_energy: constant-field closed forms") {
    const Mesh mesh = build_rect_mesh(4, 4, 1.0, 1.0);
    const int nn = mesh.n_nodes();
    MaterialParams p;
    p.c1_hat = 0.1;

    // zero state
    const InternalEnergy e0 = internal_energy(mesh, p, std::vector<double>(2 * nn, 0.0),
                                              std::vector<DevTensor>(nn),
                                              std::vector<double>(nn, 2.0));
    CHECK(e0.mech == doctest::Approx(p.c1 * p.delta).epsilon(1e-13));
    CHECK(e0.th == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(e0.total == doctest::Approx(e0.mech + e0.th));

    // linear u, constant z: the integrand is constant, both quadratures exact
    std::vector<double> u(2 * nn);
    for (int i = 0; i < nn; ++i) {
        u[2 * i] = 0.3 * mesh.nodes[i].x + 0.1 * mesh.nodes[i].y;
        u[2 * i + 1] = -0.2 * mesh.nodes[i].y;
    }
    const DevTensor zc{0.15, -0.1};
    const std::vector<DevTensor> z(nn, zc);
    const SymTensor e{0.3, 0.05, -0.2};
    const SymTensor d = e - zc.as_sym();
    const double ref = 0.5 * ddot(elastic_apply(p, d), d) + hardening_H1(p, zc).value;

    const InternalEnergy ei = internal_energy(mesh, p, u, z, std::vector<double>(nn, 0.0));
    const InternalEnergy es = solver_energy(mesh, p, u, z, std::vector<double>(nn, 0.0));
    CHECK(ei.mech == doctest::Approx(ref).epsilon(1e-13));
    CHECK(es.mech == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("internal_energy vs solver_energy on a varying z field") {
    const Mesh mesh = build_rect_mesh(8, 8, 1.0, 1.0);
    const int nn = mesh.n_nodes();
    MaterialParams p;

    std::vector<double> u(2 * nn, 0.0);
    std::vector<DevTensor> z(nn);
    for (int i = 0; i < nn; ++i)
        z[i] = {0.2 * mesh.nodes[i].x, 0.1 * mesh.nodes[i].y * mesh.nodes[i].x};
    const std::vector<double> vth(nn, 1.0);

    const InternalEnergy ei = internal_energy(mesh, p, u, z, vth);
    const InternalEnergy es = solver_energy(mesh, p, u, z, vth);
    // same nu-term and nodal H1, different rule only on the elastic quadratic;
    // the vertex rule misses the exact value at O(h^2)
    CHECK(ei.mech == doctest::Approx(es.mech).epsilon(2e-2));
    CHECK(ei.mech != es.mech);
    CHECK(ei.th == es.th);
}

TEST_CASE("enthalpy integral is invariant under the transform pair") {
    const Mesh mesh = build_rect_mesh(6, 6, 1.0, 1.0);
    const int nn = mesh.n_nodes();
    MaterialParams p;
    p.cc = 1.4;
    p.beta1 = 5.0;

    std::vector<double> vth(nn), back(nn);
    for (int i = 0; i < nn; ++i) vth[i] = 0.5 + 3.0 * mesh.nodes[i].x * mesh.nodes[i].y;
    for (int i = 0; i < nn; ++i) back[i] = g_of_theta(p, zeta_of_enthalpy(p, vth[i]));

    const std::vector<double> zero(2 * nn, 0.0);
    const std::vector<DevTensor> z(nn);
    const double a = internal_energy(mesh, p, zero, z, vth).th;
    const double b = internal_energy(mesh, p, zero, z, back).th;
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("total_entropy: uniform closed form") {
    const Mesh mesh = build_rect_mesh(5, 5, 1.0, 1.0);
    const int nn = mesh.n_nodes();
    MaterialParams p;
    p.c1_hat = 0.1;  // H2(0) = c1_hat * delta

    const std::vector<double> u0(2 * nn, 0.0);
    const std::vector<DevTensor> z0(nn);
    const std::vector<double> theta(nn, 2.0);
    const double S2 = std::log(2.0) + 3.0 + 4.5 + 7.0 / 3.0;
    CHECK(total_entropy(mesh, p, u0, z0, theta) ==
          doctest::Approx(S2 - p.c1_hat * p.delta).epsilon(1e-12));

    // a linear displacement adds -alpha * integral of tr e
    std::vector<double> u(2 * nn);
    for (int i = 0; i < nn; ++i) {
        u[2 * i] = 0.4 * mesh.nodes[i].x;
        u[2 * i + 1] = 0.2 * mesh.nodes[i].y;
    }
    CHECK(total_entropy(mesh, p, u, z0, theta) ==
          doctest::Approx(S2 - p.c1_hat * p.delta - p.alpha * 0.6).epsilon(1e-12));
}

TEST_CASE("entropy_production: signs, zeros, and a direct recomputation") {
    const Mesh mesh = build_rect_mesh(5, 4, 1.0, 1.0);
    const int nn = mesh.n_nodes();
    const int nt = mesh.n_triangles();
    MaterialParams p;
    p.c1_hat = 0.1;
    const SparseOperator K = assemble_stiffness(mesh, {kappa_c(p, {}, {}, 0.0)});

    // zero rates, uniform enthalpy: no production at all
    std::vector<double> vth(nn, 1.0), theta(nn);
    for (int i = 0; i < nn; ++i) theta[i] = zeta_of_enthalpy(p, vth[i]);
    const double P0 = entropy_production(mesh, p, K, vth, theta,
                                         std::vector<SymTensor>(nt),
                                         std::vector<DevTensor>(nn));
    CHECK(P0 == 0.0);

    // co-monotone nonuniform fields with nonzero rates
    std::mt19937 rng(26);
    std::uniform_real_distribution<double> uni(0.2, 3.0);
    for (int i = 0; i < nn; ++i) vth[i] = uni(rng);
    for (int i = 0; i < nn; ++i) theta[i] = zeta_of_enthalpy(p, vth[i]);
    std::vector<SymTensor> edot(nt);
    std::vector<DevTensor> zdot(nn);
    std::uniform_real_distribution<double> rate(-0.5, 0.5);
    for (auto& e : edot) e = {rate(rng), rate(rng), rate(rng)};
    for (auto& d : zdot) d = {rate(rng), rate(rng)};
    const double P = entropy_production(mesh, p, K, vth, theta, edot, zdot);
    CHECK(P > 0.0);

    // direct dense recomputation of the edge form plus nodal sources
    double ref = 0.0;
    for (int i = 0; i < nn; ++i)
        for (int j = i + 1; j < nn; ++j) {
            const double kij = K.get(i, j);
            if (kij != 0.0) ref += (-kij) * (vth[i] - vth[j]) * (1.0 / theta[j] - 1.0 / theta[i]);
        }
    const std::vector<double> m = node_weights(mesh);
    std::vector<double> visc(nn, 0.0);
    for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k)
            visc[mesh.triangles[t][k]] += (mesh.area[t] / 3.0) * ddot(edot[t], edot[t]);
    for (int i = 0; i < nn; ++i) {
        const double xi = p.eta_u * visc[i] / m[i] + p.eta_z * dot(zdot[i], zdot[i]) +
                          p.rho * zdot[i].norm();
        ref += m[i] * xi / theta[i];
    }
    CHECK(P == doctest::Approx(ref).epsilon(1e-12));

    theta[3] = 0.0;
    CHECK_THROWS_AS(entropy_production(mesh, p, K, vth, theta, edot, zdot), std::domain_error);
}

TEST_CASE("enthalpy_floor: closed forms and monotonicity") {
    MaterialParams p;
    p.vartheta_bar = 1.0;

    CHECK(enthalpy_floor(p, 0.01, {}) == 1.0);

    // no thermal coupling at all: the floor never decays
    MaterialParams pd = p;
    pd.alpha = 0.0;
    pd.c1_hat = 0.0;
    pd.c2_hat = 0.0;
    CHECK(enthalpy_floor(pd, 0.05, {0.4, 0.9, 2.0}) == doctest::Approx(1.0).epsilon(1e-15));

    // alpha-only decay: C = 9 alpha^2 / (2 eta_u), exponent beta1 sum dt C
    MaterialParams pa = pd;
    pa.alpha = 1.0;
    pa.eta_u = 2.0;  // C = 2.25
    const double phi = enthalpy_floor(pa, 0.25, {0.0, 0.0, 0.0, 0.0});
    CHECK(phi == doctest::Approx(std::exp(-9.0)).epsilon(1e-12));

    // longer history and larger z only push the floor down
    MaterialParams pz = p;
    pz.c1_hat = 0.5;
    pz.c2_hat = 0.25;
    double prev = 1.0;
    std::vector<double> hist;
    for (int k = 0; k < 10; ++k) {
        hist.push_back(0.1 * k);
        const double cur = enthalpy_floor(pz, 0.05, hist);
        CHECK(cur < prev);
        CHECK(cur > 0.0);
        prev = cur;
    }
}

TEST_CASE("global_monitor: bounds and tampering") {
    MaterialParams p;
    AuditLedger ledger;
    for (int n = 0; n < 5; ++n) {
        AuditRow r;
        r.t = 0.1 * n;
        r.u_H1_sq = 0.5;
        r.z_H1_sq = 0.25;
        r.vartheta_L1 = 1.0;
        // consistent with the integrated zeta bound
        r.theta_Lbeta1 = 0.5 * std::pow(p.beta1 * r.vartheta_L1 / p.cc, 1.0 / p.beta1);
        ledger.rows.push_back(r);
    }
    const MonitorReport ok = global_monitor(ledger, p);
    CHECK(!ok.flagged);
    CHECK(ok.theta_bound_ok);
    CHECK(ok.max_M == doctest::Approx(1.75));
    CHECK(ok.bound == doctest::Approx(50.0 * 1.75));
    CHECK(ok.M.size() == 5);

    AuditLedger blown = ledger;
    blown.rows[3].vartheta_L1 = 1000.0;
    CHECK(global_monitor(blown, p).flagged);

    AuditLedger hot = ledger;
    hot.rows[2].theta_Lbeta1 = 100.0;
    CHECK(!global_monitor(hot, p).theta_bound_ok);
}

TEST_CASE("energy_residual telescopes row pairs") {
    AuditRow a, b;
    a.E_mech = 1.0;
    a.E_th = 2.0;
    a.W_ext = 0.5;
    b.E_mech = 1.2;
    b.E_th = 2.1;
    b.W_ext = 0.9;
    CHECK(energy_residual(a, b) == doctest::Approx(0.3 - 0.4).epsilon(1e-12));
}
