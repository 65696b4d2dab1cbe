#include "smaflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "smaflow/config.hpp"
#include "smaflow/coupler.hpp"
#include "smaflow/errors.hpp"
#include "smaflow/io.hpp"

namespace smaflow {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Overrides {
    std::string out;
    double dt = 0.0;   // 0 means not given
    long long steps = 0;
    long long seed = 0;  // reserved, unused
};

void apply_overrides(SimConfig& cfg, const Overrides& ov) {
    if (!ov.out.empty()) cfg.out_dir = ov.out;
    if (ov.dt != 0.0) cfg.dt = ov.dt;
    if (ov.steps != 0) cfg.t_end = static_cast<double>(ov.steps) * cfg.dt;
    const auto viol = validate_config(cfg);
    if (!viol.empty()) {
        std::string msg = "invalid configuration after overrides:";
        for (const auto& v : viol) msg += "\n  " + v;
        throw ConfigError(msg);
    }
}

int do_run(const std::string& config_path, const Overrides& ov) {
    SimConfig cfg = parse_config(read_file(config_path));
    apply_overrides(cfg, ov);

    const RunResult res = run(cfg);
    const AuditRow& last = res.ledger.rows.back();
    const long long steps = static_cast<long long>(res.ledger.rows.size()) - 1;
    long long fp_total = 0;
    double min_theta = last.min_theta;
    for (const AuditRow& r : res.ledger.rows) {
        fp_total += r.coupler_iters;
        min_theta = std::min(min_theta, r.min_theta);
    }
    std::cout << "run finished: " << steps << " steps to t = " << fmt(last.t) << "\n"
              << "  E_mech = " << fmt(last.E_mech) << "  E_th = " << fmt(last.E_th)
              << "  D_cum = " << fmt(last.D_cum) << "\n"
              << "  min theta over run = " << fmt(min_theta)
              << "  coupler iterations total = " << fp_total << "\n";
    if (cfg.out_dir.empty())
        std::cout << "  no output directory configured; nothing written\n";
    else
        std::cout << "  output in " << cfg.out_dir << "\n";
    return 0;
}

void write_material_point_csv(const MaterialPointResult& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "t,e_xx,e_xy,e_yy,z_a,z_b,s_xx,s_xy,s_yy,theta,vartheta,D_cum\n";
    for (size_t i = 0; i < r.t.size(); ++i) {
        out << fmt(r.t[i]) << ',' << fmt(r.strain[i].xx) << ',' << fmt(r.strain[i].xy) << ','
            << fmt(r.strain[i].yy) << ',' << fmt(r.z[i].a) << ',' << fmt(r.z[i].b) << ','
            << fmt(r.stress[i].xx) << ',' << fmt(r.stress[i].xy) << ',' << fmt(r.stress[i].yy)
            << ',' << fmt(r.theta[i]) << ',' << fmt(r.vartheta[i]) << ',' << fmt(r.D_cum[i])
            << '\n';
    }
    if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

int do_material_point(const std::string& config_path, const Overrides& ov) {
    SimConfig cfg = parse_config(read_file(config_path));
    const MaterialPointConfig& mp = cfg.material_point;

    double dt = mp.period / mp.steps_per_cycle;
    if (ov.dt != 0.0) dt = ov.dt;
    double t_end = mp.cycles * mp.period;
    if (ov.steps != 0) t_end = static_cast<double>(ov.steps) * dt;
    if (dt <= 0.0) throw ConfigError("material-point dt must be > 0");

    const MaterialPointResult res = material_point_run(cfg.material, mp, dt, t_end);
    const double gap = res.loop_area - res.loop_dissipation;
    const double rel =
        std::abs(gap) / std::max({std::abs(res.loop_area), std::abs(res.loop_dissipation), 1e-30});
    std::cout << "material point finished: " << (res.t.size() - 1) << " steps to t = "
              << fmt(res.t.back()) << "\n"
              << "  loop area        = " << fmt(res.loop_area) << "\n"
              << "  loop dissipation = " << fmt(res.loop_dissipation) << "\n"
              << "  relative gap     = " << fmt(rel) << "\n"
              << "  D_cum            = " << fmt(res.D_cum.back()) << "\n";
    if (!ov.out.empty()) {
        write_material_point_csv(res, ov.out);
        std::cout << "  trace written to " << ov.out << "\n";
    }
    return 0;
}

int do_validate(const std::string& config_path) {
    parse_config(read_file(config_path));  // throws on any violation
    std::cout << "OK: " << config_path << "\n";
    return 0;
}

// Column-level checks recomputable from the CSV alone. Returns the name of
// the first failed check, empty on success.
std::string audit_checks(const AuditLedger& ledger, std::string& where) {
    const auto& rows = ledger.rows;
    auto at = [&where](size_t n, double t) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "row %zu (t = %.17g)", n, t);
        where = buf;
    };
    for (size_t n = 0; n < rows.size(); ++n) {
        const AuditRow& r = rows[n];
        const double cols[] = {r.t,       r.E_mech,      r.E_th,
                               r.W_ext,   r.D_cum,       r.entropy,
                               r.entropy_prod, r.min_theta, r.max_theta,
                               r.energy_residual, r.phi_floor};
        for (double c : cols)
            if (!std::isfinite(c)) {
                at(n, r.t);
                return "all columns finite";
            }
        if (n > 0 && !(r.t > rows[n - 1].t)) {
            at(n, r.t);
            return "t strictly increasing";
        }
        if (!(r.min_theta > 0.0)) {
            at(n, r.t);
            return "min_theta positive";
        }
        if (r.max_theta < r.min_theta) {
            at(n, r.t);
            return "max_theta >= min_theta";
        }
        if (r.entropy_prod < 0.0) {
            at(n, r.t);
            return "entropy production nonnegative";
        }
        if (r.coupler_iters < 0 || (n > 0 && r.coupler_iters < 1)) {
            at(n, r.t);
            return "coupler iteration count";
        }
        if (n > 0 && r.D_cum < rows[n - 1].D_cum) {
            at(n, r.t);
            return "D_cum nondecreasing";
        }
        if (!(r.phi_floor > 0.0) || (n > 0 && r.phi_floor > rows[n - 1].phi_floor * (1.0 + 1e-14))) {
            at(n, r.t);
            return "phi_floor positive and nonincreasing";
        }
        if (n > 0) {
            // the columns round-trip bitwise, so the residual identity is exact
            const double recomputed = energy_residual(rows[n - 1], r);
            const double scale = std::abs(r.E_mech) + std::abs(r.E_th) + std::abs(r.W_ext);
            if (std::abs(recomputed - r.energy_residual) > 1e-12 * std::max(1.0, scale)) {
                at(n, r.t);
                return "energy_residual identity";
            }
        }
    }
    return "";
}

int do_audit(const std::string& csv_path) {
    const AuditLedger ledger = read_timeseries(csv_path);
    std::string where;
    const std::string failed = audit_checks(ledger, where);
    if (!failed.empty()) {
        std::cerr << "audit failed: check '" << failed << "' at " << where << "\n";
        return 2;
    }
    std::cout << "audit OK: " << csv_path << " (" << ledger.rows.size() << " rows)\n";
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"smaflow: thermo-mechanical phase transformation simulator"};
    app.require_subcommand(1);

    Overrides ov;
    std::string config_path, audit_path, validate_path;

    CLI::App* cmd_run = app.add_subcommand("run", "run a coupled simulation");
    cmd_run->add_option("--config", config_path, "configuration file")->required();
    cmd_run->add_option("--out", ov.out, "output directory (overrides config)");
    cmd_run->add_option("--dt", ov.dt, "time step (overrides config)");
    cmd_run->add_option("--steps", ov.steps, "step count; sets t_end = steps * dt");
    cmd_run->add_option("--seed", ov.seed, "reserved");

    CLI::App* cmd_mp = app.add_subcommand("material-point", "run the 0-D driver");
    cmd_mp->add_option("--config", config_path, "configuration file")->required();
    cmd_mp->add_option("--out", ov.out, "CSV path for the state trace");
    cmd_mp->add_option("--dt", ov.dt, "time step (overrides period / steps_per_cycle)");
    cmd_mp->add_option("--steps", ov.steps, "step count; sets t_end = steps * dt");
    cmd_mp->add_option("--seed", ov.seed, "reserved");

    CLI::App* cmd_validate = app.add_subcommand("validate", "check a configuration file");
    cmd_validate->add_option("config", validate_path, "configuration file")->required();

    CLI::App* cmd_audit = app.add_subcommand("audit", "recheck a saved time series");
    cmd_audit->add_option("timeseries", audit_path, "timeseries.csv from a run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (const char* env = std::getenv("SMAFLOW_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 1)
            std::cerr << "SMAFLOW_THREADS=" << env
                      << " requested; all sections run single-threaded\n";
    }

    try {
        if (cmd_run->parsed()) return do_run(config_path, ov);
        if (cmd_mp->parsed()) return do_material_point(config_path, ov);
        if (cmd_validate->parsed()) return do_validate(validate_path);
        if (cmd_audit->parsed()) return do_audit(audit_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace smaflow
