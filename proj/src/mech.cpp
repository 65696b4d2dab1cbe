#include "smaflow/mech.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smaflow/errors.hpp"

namespace smaflow {

namespace {

// Strain of the scalar P1 basis function at a node moved in direction dir.
SymTensor basis_strain(Vec2 g, int dir) {
    if (dir == 0) return {g.x, 0.5 * g.y, 0.0};
    return {0.0, 0.5 * g.x, g.y};
}

SymTensor iso_apply(double two_mu_like, double lambda_like, SymTensor xi) {
    const double lt = lambda_like * xi.trace();
    return {two_mu_like * xi.xx + lt, two_mu_like * xi.xy, two_mu_like * xi.yy + lt};
}

// CSR pattern on interleaved (x,y) dofs, same ordering scheme as the scalar
// pattern in sparse.cpp.
SparseOperator make_vector_pattern(const Mesh& mesh) {
    const int nn = mesh.n_nodes();
    std::vector<std::vector<int>> adj(nn);
    for (int t = 0; t < mesh.n_triangles(); ++t)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) adj[mesh.triangles[t][a]].push_back(mesh.triangles[t][b]);
    SparseOperator A;
    A.rows = A.cols = 2 * nn;
    A.symmetric = true;
    A.row_ptr.assign(2 * nn + 1, 0);
    for (int i = 0; i < nn; ++i) {
        auto& nb = adj[i];
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        A.row_ptr[2 * i + 1] = 2 * static_cast<int>(nb.size());
        A.row_ptr[2 * i + 2] = 2 * static_cast<int>(nb.size());
    }
    for (int i = 0; i < 2 * nn; ++i) A.row_ptr[i + 1] += A.row_ptr[i];
    A.col_idx.resize(A.row_ptr[2 * nn]);
    A.vals.assign(A.row_ptr[2 * nn], 0.0);
    for (int i = 0; i < nn; ++i) {
        for (int d = 0; d < 2; ++d) {
            int k = A.row_ptr[2 * i + d];
            for (int j : adj[i]) {
                A.col_idx[k++] = 2 * j;
                A.col_idx[k++] = 2 * j + 1;
            }
        }
    }
    return A;
}

void add_at(SparseOperator& A, int i, int j, double v) {
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
        if (A.col_idx[k] == j) {
            A.vals[k] += v;
            return;
        }
    }
    throw std::logic_error("vector assembly: entry outside pattern");
}

// Smooth part of the incremental functional at fixed u and theta:
//   G(z) = sum_T (A_T/3) sum_{a in T} 1/2 E(e_T - z_a):(e_T - z_a)
//        + sum_i m_i (H1(z_i) + theta_i H2(z_i))
//        + nu/2 (a^T K1 a + b^T K1 b)
struct ZObjective {
    const Mesh& mesh;
    const MaterialParams& p;
    std::vector<SymTensor> strain;
    const std::vector<double>& theta;
    std::vector<double> m;
    SparseOperator K1;
    mutable std::vector<double> av, bv, Ka, Kb;

    ZObjective(const Mesh& mesh_, const MaterialParams& p_, const std::vector<double>& u,
               const std::vector<double>& theta_)
        : mesh(mesh_),
          p(p_),
          strain(element_strain(mesh_, u)),
          theta(theta_),
          m(node_weights(mesh_)),
          K1(assemble_stiffness(mesh_, std::vector<SymTensor>{SymTensor{1.0, 0.0, 1.0}})) {
        const size_t n = mesh.n_nodes();
        if (theta.size() != n) throw std::invalid_argument("z objective: theta size mismatch");
        av.resize(n);
        bv.resize(n);
        Ka.resize(n);
        Kb.resize(n);
    }

    void nu_products(const std::vector<DevTensor>& z) const {
        const int n = mesh.n_nodes();
        for (int i = 0; i < n; ++i) {
            av[i] = z[i].a;
            bv[i] = z[i].b;
        }
        K1.apply(av.data(), Ka.data());
        K1.apply(bv.data(), Kb.data());
    }

    double energy(const std::vector<DevTensor>& z) const {
        double E = 0.0;
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const double w = mesh.area[t] / 3.0;
            for (int a = 0; a < 3; ++a) {
                const SymTensor d = strain[t] - z[mesh.triangles[t][a]].as_sym();
                E += w * 0.5 * ddot(elastic_apply(p, d), d);
            }
        }
        const int n = mesh.n_nodes();
        for (int i = 0; i < n; ++i)
            E += m[i] * (hardening_H1(p, z[i]).value + theta[i] * hardening_H2(p, z[i]).value);
        if (p.nu != 0.0) {
            nu_products(z);
            double q = 0.0;
            for (int i = 0; i < n; ++i) q += av[i] * Ka[i] + bv[i] * Kb[i];
            E += 0.5 * p.nu * q;
        }
        return E;
    }

    void gradient(const std::vector<DevTensor>& z, std::vector<DevTensor>& g) const {
        const int n = mesh.n_nodes();
        g.assign(n, DevTensor{});
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const double w = mesh.area[t] / 3.0;
            for (int a = 0; a < 3; ++a) {
                const int i = mesh.triangles[t][a];
                const SymTensor S = elastic_apply(p, strain[t] - z[i].as_sym());
                // contraction of S with d(z_hat)/da and d(z_hat)/db
                g[i].a -= w * (S.xx - S.yy);
                g[i].b -= w * (2.0 * S.xy);
            }
        }
        for (int i = 0; i < n; ++i) {
            const HardeningEval h1 = hardening_H1(p, z[i]);
            const HardeningEval h2 = hardening_H2(p, z[i]);
            g[i] = g[i] + m[i] * (h1.grad + theta[i] * h2.grad);
        }
        if (p.nu != 0.0) {
            nu_products(z);
            for (int i = 0; i < n; ++i) {
                g[i].a += p.nu * Ka[i];
                g[i].b += p.nu * Kb[i];
            }
        }
    }
};

}  // namespace

SparseOperator assemble_vector_stiffness(const Mesh& mesh, double two_mu_like, double lambda_like,
                                         bool apply_dirichlet) {
    SparseOperator A = make_vector_pattern(mesh);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int a = 0; a < 3; ++a) {
            for (int i = 0; i < 2; ++i) {
                const SymTensor Eea =
                    iso_apply(two_mu_like, lambda_like, basis_strain(mesh.grads[t][a], i));
                for (int b = 0; b < 3; ++b) {
                    for (int j = 0; j < 2; ++j) {
                        const double v =
                            mesh.area[t] * ddot(Eea, basis_strain(mesh.grads[t][b], j));
                        add_at(A, 2 * tri[a] + i, 2 * tri[b] + j, v);
                    }
                }
            }
        }
    }
    if (apply_dirichlet) {
        std::vector<char> fixed(2 * mesh.n_nodes(), 0);
        for (int n = 0; n < mesh.n_nodes(); ++n)
            if (mesh.on_boundary[n]) fixed[2 * n] = fixed[2 * n + 1] = 1;
        for (int i = 0; i < A.rows; ++i) {
            for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
                const int j = A.col_idx[k];
                if ((fixed[i] || fixed[j]) && i != j) A.vals[k] = 0.0;
            }
        }
    }
    return A;
}

std::vector<double> u_solve(const Mesh& mesh, const MaterialParams& p,
                            const std::vector<double>& u_prev, const std::vector<DevTensor>& z,
                            const std::vector<double>& theta, const std::vector<double>& load,
                            double dt, double lin_tol, int lin_max_iters,
                            const std::vector<double>* x0) {
    const int nn = mesh.n_nodes();
    if (!(dt > 0.0)) throw std::invalid_argument("u_solve: dt must be > 0");
    if (u_prev.size() != static_cast<size_t>(2 * nn) || load.size() != static_cast<size_t>(2 * nn) ||
        z.size() != static_cast<size_t>(nn) || theta.size() != static_cast<size_t>(nn))
        throw std::invalid_argument("u_solve: field size mismatch");

    const SparseOperator A =
        assemble_vector_stiffness(mesh, 2.0 * p.mu + p.eta_u / dt, p.lambda, true);

    // consistent-mass load, applied per direction
    const SparseOperator M = assemble_mass(mesh, false);
    std::vector<double> lx(nn), ly(nn);
    for (int i = 0; i < nn; ++i) {
        lx[i] = load[2 * i];
        ly[i] = load[2 * i + 1];
    }
    const std::vector<double> Mx = M.apply(lx), My = M.apply(ly);
    std::vector<double> rhs(2 * nn);
    for (int i = 0; i < nn; ++i) {
        rhs[2 * i] = Mx[i];
        rhs[2 * i + 1] = My[i];
    }

    // element-mean coupling stress (E z - alpha theta I) tested against e(phi)
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const DevTensor zbar = (1.0 / 3.0) * (z[tri[0]] + z[tri[1]] + z[tri[2]]);
        const double thbar = (theta[tri[0]] + theta[tri[1]] + theta[tri[2]]) / 3.0;
        SymTensor coup = elastic_apply(p, zbar.as_sym());
        coup.xx -= p.alpha * thbar;
        coup.yy -= p.alpha * thbar;
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < 2; ++i)
                rhs[2 * tri[a] + i] +=
                    mesh.area[t] * ddot(coup, basis_strain(mesh.grads[t][a], i));
    }

    // viscous history (L/dt) e(u_prev)
    const SparseOperator KL = assemble_vector_stiffness(mesh, p.eta_u, 0.0, false);
    const std::vector<double> hist = KL.apply(u_prev);
    for (int k = 0; k < 2 * nn; ++k) rhs[k] += hist[k] / dt;

    for (int n = 0; n < nn; ++n) {
        if (mesh.on_boundary[n]) {
            rhs[2 * n] = 0.0;
            rhs[2 * n + 1] = 0.0;
        }
    }
    return solve_spd(A, rhs, lin_tol, lin_max_iters, x0);
}

namespace {

double nonsmooth_part(const MaterialParams& p, const std::vector<double>& m,
                      const std::vector<DevTensor>& z, const std::vector<DevTensor>& z_prev,
                      double dt) {
    double N = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        const DevTensor d = z[i] - z_prev[i];
        const double dn = d.norm();
        N += m[i] * (p.rho * dn + 0.5 * (p.eta_z / dt) * dn * dn);
    }
    return N;
}

}  // namespace

std::vector<DevTensor> z_update(const Mesh& mesh, const MaterialParams& p,
                                const std::vector<double>& u,
                                const std::vector<DevTensor>& z_prev,
                                const std::vector<double>& theta, double dt,
                                const MechConfig& cfg, MechDiagnostics* diag,
                                const std::vector<DevTensor>* warm) {
    if (!(dt > 0.0)) throw std::invalid_argument("z_update: dt must be > 0");
    if (z_prev.size() != static_cast<size_t>(mesh.n_nodes()))
        throw std::invalid_argument("z_update: z size mismatch");
    const ZObjective obj(mesh, p, u, theta);
    const int n = mesh.n_nodes();
    const double shrink_coef = p.eta_z / dt;
    const double tau0 = dt / p.eta_z;

    std::vector<DevTensor> z = warm ? *warm : z_prev;
    std::vector<DevTensor> grad(n), znew(n);
    double G = obj.energy(z);
    obj.gradient(z, grad);
    double J = G + nonsmooth_part(p, obj.m, z, z_prev, dt);

    double tau_acc = tau0;
    double resmax = 0.0;
    for (int iter = 0; iter <= cfg.max_prox_iters; ++iter) {
        // stationarity: per-node prox fixed-point residual
        resmax = 0.0;
        double dinf = 0.0;
        for (int i = 0; i < n; ++i) {
            const DevTensor r = (-1.0 / obj.m[i]) * grad[i];
            const DevTensor target = shrink(r, p.rho, shrink_coef);
            const DevTensor d = z[i] - z_prev[i];
            resmax = std::max(resmax, (d - target).norm());
            dinf = std::max(dinf, d.norm());
        }
        if (resmax <= cfg.tol_z * std::max(1.0, dinf)) {
            if (diag) diag->max_flow_residual = std::max(diag->max_flow_residual, resmax);
            return z;
        }
        if (iter == cfg.max_prox_iters) break;

        double tau = cfg.backtracking ? std::min(tau0, 2.0 * tau_acc) : tau0;
        double Gnew = 0.0;
        while (true) {
            for (int i = 0; i < n; ++i) {
                const DevTensor q =
                    (1.0 / tau) * (z[i] - z_prev[i]) - (1.0 / obj.m[i]) * grad[i];
                znew[i] = z_prev[i] + shrink(q, p.rho, shrink_coef + 1.0 / tau);
            }
            Gnew = obj.energy(znew);
            if (!cfg.backtracking) break;
            double lin = G, quad = 0.0;
            for (int i = 0; i < n; ++i) {
                const DevTensor step = znew[i] - z[i];
                lin += dot(grad[i], step);
                quad += obj.m[i] * dot(step, step);
            }
            lin += quad / (2.0 * tau);
            if (Gnew <= lin + 1e-12 * (1.0 + std::abs(lin))) break;
            tau *= 0.5;
            if (tau < 1e-16 * tau0)
                throw SolverError("z_update: backtracking step collapsed", resmax, iter);
        }
        tau_acc = tau;

        const double Jnew = Gnew + nonsmooth_part(p, obj.m, znew, z_prev, dt);
        if (Jnew > J + 1e-12 * (1.0 + std::abs(J)))
            throw SolverError("z_update: incremental energy increased", Jnew - J, iter);

        bool moved = false;
        for (int i = 0; i < n; ++i)
            if (znew[i].a != z[i].a || znew[i].b != z[i].b) {
                moved = true;
                break;
            }
        z.swap(znew);
        G = Gnew;
        J = Jnew;
        obj.gradient(z, grad);
        if (diag) ++diag->prox_iters;
        if (!moved) break;  // exact fixed point of the tau-prox; residual re-checked below
    }

    // re-check after a stagnation break
    resmax = 0.0;
    double dinf = 0.0;
    for (int i = 0; i < n; ++i) {
        const DevTensor r = (-1.0 / obj.m[i]) * grad[i];
        const DevTensor d = z[i] - z_prev[i];
        resmax = std::max(resmax, (d - shrink(r, p.rho, shrink_coef)).norm());
        dinf = std::max(dinf, d.norm());
    }
    if (resmax <= cfg.tol_z * std::max(1.0, dinf)) {
        if (diag) diag->max_flow_residual = std::max(diag->max_flow_residual, resmax);
        return z;
    }
    throw SolverError("z_update: proximal iteration did not converge", resmax, cfg.max_prox_iters);
}

MechState mech_step(const Mesh& mesh, const MaterialParams& p, const MechState& prev,
                    const std::vector<double>& theta, const std::vector<double>& load, double dt,
                    const MechConfig& cfg, MechDiagnostics* diag) {
    if (cfg.max_outer < 1 || cfg.max_prox_iters < 1)
        throw std::invalid_argument("mech_step: iteration caps must be >= 1");
    if (!(cfg.tol_outer > 0.0 && cfg.tol_outer < 1.0) || !(cfg.tol_z > 0.0 && cfg.tol_z < 1.0))
        throw std::invalid_argument("mech_step: tolerances must lie in (0,1)");

    MechState cur = prev;
    double rel = 0.0;
    for (int sweep = 1; sweep <= cfg.max_outer; ++sweep) {
        const std::vector<double> unew = u_solve(mesh, p, prev.u, cur.z, theta, load, dt,
                                                 cfg.lin_tol, cfg.lin_max_iters, &cur.u);
        const std::vector<DevTensor> znew =
            z_update(mesh, p, unew, prev.z, theta, dt, cfg, diag, &cur.z);

        double num = 0.0, den = 0.0;
        for (size_t k = 0; k < unew.size(); ++k) {
            const double d = unew[k] - cur.u[k];
            num += d * d;
            den += unew[k] * unew[k];
        }
        for (size_t i = 0; i < znew.size(); ++i) {
            const DevTensor d = znew[i] - cur.z[i];
            num += dot(d, d);
            den += dot(znew[i], znew[i]);
        }
        rel = std::sqrt(num) / std::max(std::sqrt(den), 1e-30);
        cur.u = unew;
        cur.z = znew;
        if (diag) {
            diag->outer_sweeps = sweep;
            diag->last_update = rel;
            diag->sweep_updates.push_back(rel);
        }
        if (rel <= cfg.tol_outer) {
            if (diag) {
                const auto res = flow_residual(mesh, p, cur.u, cur.z, prev.z, theta, dt);
                double mx = 0.0;
                for (double v : res) mx = std::max(mx, v);
                diag->max_flow_residual = mx;
            }
            return cur;
        }
    }
    throw SolverError("mech_step: outer iteration did not converge (try a smaller dt)", rel,
                      cfg.max_outer);
}

std::vector<double> flow_residual(const Mesh& mesh, const MaterialParams& p,
                                  const std::vector<double>& u, const std::vector<DevTensor>& z,
                                  const std::vector<DevTensor>& z_prev,
                                  const std::vector<double>& theta, double dt) {
    const ZObjective obj(mesh, p, u, theta);
    const int n = mesh.n_nodes();
    std::vector<DevTensor> grad(n);
    obj.gradient(z, grad);
    std::vector<double> res(n);
    for (int i = 0; i < n; ++i) {
        const DevTensor r = (-1.0 / obj.m[i]) * grad[i];
        const DevTensor target = shrink(r, p.rho, p.eta_z / dt);
        res[i] = ((z[i] - z_prev[i]) - target).norm();
    }
    return res;
}

}  // namespace smaflow
