#include "smaflow/coupler.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "smaflow/errors.hpp"
#include "smaflow/io.hpp"

namespace smaflow {

namespace {

const double kPi = 3.14159265358979323846;

std::vector<double> load_field(const Mesh& mesh, const LoadConfig& lc, double t) {
    const double q =
        lc.law == LoadLaw::Sine ? std::sin(2.0 * kPi * t / lc.period) : 1.0;
    std::vector<double> l(2 * mesh.n_nodes());
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        const double s = std::sin(kPi * mesh.nodes[i].x / mesh.Lx) *
                         std::sin(kPi * mesh.nodes[i].y / mesh.Ly);
        l[2 * i] = lc.amplitude * q * s * lc.dir_x;
        l[2 * i + 1] = lc.amplitude * q * s * lc.dir_y;
    }
    return l;
}

double l2_norm(const std::vector<double>& m, const std::vector<double>& x) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += m[i] * x[i] * x[i];
    return std::sqrt(s);
}

}  // namespace

StepResult coupled_step(const Mesh& mesh, const MaterialParams& p, const CoupledState& state_n,
                        const std::vector<double>& load_next, const CouplerConfig& ccfg,
                        const MechConfig& mcfg, const ThermalConfig& tcfg) {
    if (!(ccfg.dt > 0.0)) throw std::invalid_argument("coupled_step: dt must be > 0");
    if (!(ccfg.tol_couple > 0.0 && ccfg.tol_couple < 1.0))
        throw std::invalid_argument("coupled_step: tol_couple must lie in (0,1)");
    if (!(ccfg.omega > 0.0 && ccfg.omega <= 1.0))
        throw std::invalid_argument("coupled_step: omega must lie in (0,1]");
    if (ccfg.max_fp_iters < 1)
        throw std::invalid_argument("coupled_step: max_fp_iters must be >= 1");

    const int nn = mesh.n_nodes();
    const double dt = ccfg.dt;
    const std::vector<double> m = node_weights(mesh);
    const std::vector<SymTensor> strain_n = element_strain(mesh, state_n.mech.u);
    const std::vector<SymTensor> kap{kappa_c(p, SymTensor{}, DevTensor{}, 0.0)};

    std::vector<double> vt_tilde = state_n.vartheta;  // fixed-point iterate
    std::vector<double> v_last = state_n.vartheta;    // previously produced enthalpy
    std::vector<double> theta(nn), diff(nn);
    double residual = 0.0;

    for (int k = 1; k <= ccfg.max_fp_iters; ++k) {
        for (int i = 0; i < nn; ++i) theta[i] = zeta_of_enthalpy(p, vt_tilde[i]);

        MechDiagnostics mdiag;
        MechState mech =
            mech_step(mesh, p, state_n.mech, theta, load_next, dt, mcfg, &mdiag);

        const std::vector<SymTensor> strain_new = element_strain(mesh, mech.u);
        std::vector<SymTensor> edot(mesh.n_triangles());
        for (int t = 0; t < mesh.n_triangles(); ++t)
            edot[t] = (1.0 / dt) * (strain_new[t] - strain_n[t]);
        std::vector<DevTensor> zdot(nn);
        for (int i = 0; i < nn; ++i) zdot[i] = (1.0 / dt) * (mech.z[i] - state_n.mech.z[i]);

        const std::vector<double> f = heat_source(mesh, p, edot, theta, mech.z, zdot);
        const std::vector<double> v = thermal_step(mesh, state_n.vartheta, kap, f, dt, tcfg);

        for (int i = 0; i < nn; ++i) diff[i] = v[i] - v_last[i];
        residual = l2_norm(m, diff);
        const bool converged = residual <= ccfg.tol_couple * std::max(l2_norm(m, v), 1.0);

        if (converged) {
            double mn = v[0];
            for (int i = 1; i < nn; ++i) mn = std::min(mn, v[i]);
            if (!(mn > 0.0))
                throw SolverError("coupled_step: enthalpy positivity violated", mn, k);

            StepResult out;
            out.state.mech = std::move(mech);
            out.state.vartheta = v;
            out.state.t = state_n.t + dt;
            out.iterations = k;
            out.f = f;
            out.theta_used = theta;
            out.mech_diag = mdiag;
            long double defect = 0.0L;
            for (int i = 0; i < nn; ++i)
                defect += (long double)m[i] *
                          ((long double)v[i] - state_n.vartheta[i] - dt * (long double)f[i]);
            out.conservation_defect = (double)defect;
            return out;
        }
        for (int i = 0; i < nn; ++i)
            vt_tilde[i] = (1.0 - ccfg.omega) * vt_tilde[i] + ccfg.omega * v[i];
        v_last = v;
    }
    throw SolverError("coupled_step: fixed point did not converge (try a smaller dt)", residual,
                      ccfg.max_fp_iters);
}

namespace {

void fill_state_row(AuditRow& row, const Mesh& mesh, const MaterialParams& p,
                    const CoupledState& s) {
    const int nn = mesh.n_nodes();
    const std::vector<double> m = node_weights(mesh);

    std::vector<double> theta(nn);
    for (int i = 0; i < nn; ++i) theta[i] = zeta_of_enthalpy(p, s.vartheta[i]);

    const InternalEnergy E = solver_energy(mesh, p, s.mech.u, s.mech.z, s.vartheta);
    row.E_mech = E.mech;
    row.E_th = E.th;
    row.entropy = total_entropy(mesh, p, s.mech.u, s.mech.z, theta);

    row.min_theta = theta[0];
    row.max_theta = theta[0];
    row.min_vartheta = s.vartheta[0];
    double l1 = 0.0, lb = 0.0, z_l2 = 0.0, u_l2 = 0.0, zinf = 0.0;
    for (int i = 0; i < nn; ++i) {
        row.min_theta = std::min(row.min_theta, theta[i]);
        row.max_theta = std::max(row.max_theta, theta[i]);
        row.min_vartheta = std::min(row.min_vartheta, s.vartheta[i]);
        l1 += m[i] * std::abs(s.vartheta[i]);
        lb += m[i] * std::pow(theta[i], p.beta1);
        z_l2 += m[i] * dot(s.mech.z[i], s.mech.z[i]);
        const double ux = s.mech.u[2 * i], uy = s.mech.u[2 * i + 1];
        u_l2 += m[i] * (ux * ux + uy * uy);
        zinf = std::max(zinf, s.mech.z[i].norm());
    }
    row.vartheta_L1 = l1;
    row.theta_Lbeta1 = std::pow(lb, 1.0 / p.beta1);
    row.znorm_inf = zinf;

    // H1 seminorm parts from the constant element gradients
    double u_h1 = 0.0, z_h1 = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        double gxx = 0.0, gxy = 0.0, gyx = 0.0, gyy = 0.0;
        Vec2 ga{0.0, 0.0}, gb{0.0, 0.0};
        for (int k = 0; k < 3; ++k) {
            const int i = mesh.triangles[t][k];
            const Vec2 g = mesh.grads[t][k];
            gxx += g.x * s.mech.u[2 * i];
            gxy += g.y * s.mech.u[2 * i];
            gyx += g.x * s.mech.u[2 * i + 1];
            gyy += g.y * s.mech.u[2 * i + 1];
            ga.x += g.x * s.mech.z[i].a;
            ga.y += g.y * s.mech.z[i].a;
            gb.x += g.x * s.mech.z[i].b;
            gb.y += g.y * s.mech.z[i].b;
        }
        u_h1 += mesh.area[t] * (gxx * gxx + gxy * gxy + gyx * gyx + gyy * gyy);
        z_h1 += mesh.area[t] * (ga.x * ga.x + ga.y * ga.y + gb.x * gb.x + gb.y * gb.y);
    }
    row.u_H1_sq = u_l2 + u_h1;
    row.z_H1_sq = z_l2 + z_h1;
}

}  // namespace

RunResult run(const SimConfig& cfg) {
    {
        const auto viol = validate_config(cfg);
        if (!viol.empty()) {
            std::string msg = "invalid configuration:";
            for (const auto& v : viol) msg += "\n  " + v;
            throw ConfigError(msg);
        }
    }
    const Mesh mesh = build_rect_mesh(cfg.nx, cfg.ny, cfg.Lx, cfg.Ly);
    const MaterialParams& p = cfg.material;
    const int nn = mesh.n_nodes();

    CouplerConfig ccfg;
    ccfg.tol_couple = cfg.tol_couple;
    ccfg.max_fp_iters = cfg.max_fp_iters;
    ccfg.omega = cfg.omega;
    ccfg.dt = cfg.dt;
    ccfg.t_end = cfg.t_end;

    CoupledState state;
    state.mech.u.assign(2 * nn, 0.0);
    state.mech.z.assign(nn, cfg.z0);
    state.vartheta.assign(nn, cfg.vartheta0);
    state.t = 0.0;

    const std::vector<double> m = node_weights(mesh);
    const SparseOperator Mcons = assemble_mass(mesh, false);
    const std::vector<SymTensor> kap{kappa_c(p, SymTensor{}, DevTensor{}, 0.0)};
    const SparseOperator Kth = assemble_stiffness(mesh, kap);

    const bool writing = !cfg.out_dir.empty();
    if (writing) {
        std::filesystem::create_directories(cfg.out_dir);
        write_mesh_file(mesh, cfg.out_dir + "/mesh.txt");
    }
    auto snapshot_name = [&](long long n) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "/snapshot_%06lld.txt", n);
        return cfg.out_dir + buf;
    };

    RunResult result;
    std::vector<double> zinf_hist;
    double W_ext = 0.0, D_cum = 0.0;

    AuditRow row0;
    row0.t = 0.0;
    fill_state_row(row0, mesh, p, state);
    row0.phi_floor = enthalpy_floor(p, cfg.dt, zinf_hist);
    result.ledger.rows.push_back(row0);
    if (writing) write_snapshot(mesh, state, snapshot_name(0));

    const long long steps = std::llround(cfg.t_end / cfg.dt);
    for (long long n = 1; n <= steps; ++n) {
        const std::vector<double> load = load_field(mesh, cfg.load, state.t + cfg.dt);
        zinf_hist.push_back(result.ledger.rows.back().znorm_inf);

        const std::vector<SymTensor> strain_old = element_strain(mesh, state.mech.u);
        StepResult res = coupled_step(mesh, p, state, load, ccfg, cfg.mech, cfg.thermal);

        // rates over the accepted step
        const std::vector<SymTensor> strain_new = element_strain(mesh, res.state.mech.u);
        std::vector<SymTensor> edot(mesh.n_triangles());
        for (int t = 0; t < mesh.n_triangles(); ++t)
            edot[t] = (1.0 / cfg.dt) * (strain_new[t] - strain_old[t]);
        std::vector<DevTensor> zdot(nn);
        for (int i = 0; i < nn; ++i)
            zdot[i] = (1.0 / cfg.dt) * (res.state.mech.z[i] - state.mech.z[i]);

        // external work increment with the same consistent-mass load as u_solve
        std::vector<double> lx(nn), ly(nn);
        for (int i = 0; i < nn; ++i) {
            lx[i] = load[2 * i];
            ly[i] = load[2 * i + 1];
        }
        const std::vector<double> Mx = Mcons.apply(lx), My = Mcons.apply(ly);
        double W_inc = 0.0;
        for (int i = 0; i < nn; ++i) {
            W_inc += Mx[i] * (res.state.mech.u[2 * i] - state.mech.u[2 * i]);
            W_inc += My[i] * (res.state.mech.u[2 * i + 1] - state.mech.u[2 * i + 1]);
        }
        W_ext += W_inc;

        double visc = 0.0;
        for (int t = 0; t < mesh.n_triangles(); ++t)
            visc += mesh.area[t] * ddot(edot[t], edot[t]);
        double zdiss = 0.0;
        for (int i = 0; i < nn; ++i) {
            const DevTensor d = res.state.mech.z[i] - state.mech.z[i];
            const double dn = d.norm();
            zdiss += m[i] * (p.rho * dn + (p.eta_z / cfg.dt) * dn * dn);
        }
        D_cum += cfg.dt * p.eta_u * visc + zdiss;

        std::vector<double> theta_new(nn);
        for (int i = 0; i < nn; ++i)
            theta_new[i] = zeta_of_enthalpy(p, res.state.vartheta[i]);
        const double P =
            entropy_production(mesh, p, Kth, res.state.vartheta, theta_new, edot, zdot);

        AuditRow row;
        row.t = res.state.t;
        fill_state_row(row, mesh, p, res.state);
        row.W_ext = W_ext;
        row.D_cum = D_cum;
        row.entropy_prod = P;
        row.coupler_iters = res.iterations;
        row.conservation_defect = res.conservation_defect;
        row.phi_floor = enthalpy_floor(p, cfg.dt, zinf_hist);
        row.energy_residual = energy_residual(result.ledger.rows.back(), row);
        result.ledger.rows.push_back(row);

        state = std::move(res.state);
        if (writing && (n % cfg.snapshot_stride == 0 || n == steps))
            write_snapshot(mesh, state, snapshot_name(n));
    }

    if (writing) write_timeseries(result.ledger, cfg.out_dir + "/timeseries.csv");
    result.final_state = state;
    return result;
}

namespace {

// single-point version of the z incremental problem, same proximal scheme as
// z_update with unit mass weight
DevTensor z_point_solve(const MaterialParams& p, SymTensor e, DevTensor z_prev, double theta,
                        double dt) {
    auto energy = [&](DevTensor z) {
        const SymTensor d = e - z.as_sym();
        return 0.5 * ddot(elastic_apply(p, d), d) + hardening_H1(p, z).value +
               theta * hardening_H2(p, z).value;
    };
    auto gradient = [&](DevTensor z) {
        const SymTensor S = elastic_apply(p, e - z.as_sym());
        const HardeningEval h1 = hardening_H1(p, z);
        const HardeningEval h2 = hardening_H2(p, z);
        return DevTensor{-(S.xx - S.yy) + h1.grad.a + theta * h2.grad.a,
                         -2.0 * S.xy + h1.grad.b + theta * h2.grad.b};
    };
    const double shrink_coef = p.eta_z / dt;
    const double tau0 = dt / p.eta_z;

    DevTensor z = z_prev;
    double G = energy(z);
    DevTensor g = gradient(z);
    for (int iter = 0; iter < 500; ++iter) {
        const DevTensor d = z - z_prev;
        const DevTensor target = shrink(DevTensor{-g.a, -g.b}, p.rho, shrink_coef);
        if ((d - target).norm() <= 1e-13 * std::max(1.0, d.norm())) return z;

        double tau = tau0;
        DevTensor znew;
        double Gnew = 0.0;
        while (true) {
            const DevTensor q = (1.0 / tau) * d - g;
            znew = z_prev + shrink(q, p.rho, shrink_coef + 1.0 / tau);
            Gnew = energy(znew);
            const DevTensor step = znew - z;
            const double lin = G + dot(g, step) + dot(step, step) / (2.0 * tau);
            if (Gnew <= lin + 1e-14 * (1.0 + std::abs(lin))) break;
            tau *= 0.5;
            if (tau < 1e-16 * tau0)
                throw SolverError("material point: backtracking step collapsed", d.norm(), iter);
        }
        if (znew.a == z.a && znew.b == z.b) return z;
        z = znew;
        G = Gnew;
        g = gradient(z);
    }
    throw SolverError("material point: z iteration did not converge", 0.0, 500);
}

}  // namespace

MaterialPointResult material_point_run(const MaterialParams& p, const MaterialPointConfig& path,
                                       double dt, double t_end) {
    if (!(dt > 0.0) || !(t_end >= 0.0))
        throw std::invalid_argument("material_point_run: need dt > 0 and t_end >= 0");
    if (path.mode != "isothermal" && path.mode != "adiabatic")
        throw ConfigError("material_point.mode must be isothermal or adiabatic");
    if (!(path.theta0 > 0.0)) throw ConfigError("material_point.theta0 must be > 0");

    auto strain_at = [&](double t) {
        const double s = std::sin(2.0 * kPi * t / path.period);
        const double sh = std::sin(2.0 * kPi * t / path.period + path.shear_phase);
        return SymTensor{path.vol_amp * s + path.dev_amp * s, path.shear_amp * sh,
                         path.vol_amp * s - path.dev_amp * s};
    };
    const bool adiabatic = path.mode == "adiabatic";

    MaterialPointResult out;
    const long long steps = std::llround(t_end / dt);
    out.t.reserve(steps + 1);

    DevTensor z{};
    double vartheta = g_of_theta(p, path.theta0);
    double theta = path.theta0;
    double D = 0.0;

    auto push = [&](double t, SymTensor e) {
        SymTensor sig = elastic_apply(p, e - z.as_sym());
        sig.xx += p.alpha * theta;
        sig.yy += p.alpha * theta;
        out.t.push_back(t);
        out.strain.push_back(e);
        out.z.push_back(z);
        out.stress.push_back(sig);
        out.theta.push_back(theta);
        out.vartheta.push_back(vartheta);
        out.D_cum.push_back(D);
    };
    push(0.0, strain_at(0.0));

    std::vector<double> step_diss(steps, 0.0);
    for (long long n = 1; n <= steps; ++n) {
        const double t = (double)n * dt;
        const SymTensor e = strain_at(t);
        const SymTensor e_old = out.strain.back();
        const DevTensor z_old = z;

        z = z_point_solve(p, e, z_old, theta, dt);
        const DevTensor dz = z - z_old;
        const double dn = dz.norm();
        const double diss = p.rho * dn + (p.eta_z / dt) * dn * dn;
        step_diss[n - 1] = diss;
        D += diss;

        if (adiabatic) {
            // theta frozen at zeta(vartheta^n) within the step; no viscous
            // term in 0-D (no momentum balance to dissipate against)
            const double trdot = (e.trace() - e_old.trace()) / dt;
            const double h2dot = dot(hardening_H2(p, z).grad, (1.0 / dt) * dz);
            const double f = theta * (p.alpha * trdot + h2dot) + p.rho * dn / dt +
                             p.eta_z * (dn / dt) * (dn / dt);
            vartheta += dt * f;
            theta = zeta_of_enthalpy(p, vartheta);
        }
        push(t, e);
    }

    // last full cycle (or the whole run when shorter than one period)
    const long long per_cycle = std::max(1LL, std::llround(path.period / dt));
    const long long first = std::max(0LL, steps - per_cycle);
    double area = 0.0, diss = 0.0;
    for (long long n = first; n < steps; ++n) {
        const SymTensor de = out.strain[n + 1] - out.strain[n];
        const SymTensor sig_mid = 0.5 * (out.stress[n] + out.stress[n + 1]);
        area += ddot(sig_mid, de);
        diss += step_diss[n];
    }
    out.loop_area = area;
    out.loop_dissipation = diss;
    return out;
}

}  // namespace smaflow
