#include "smaflow/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "smaflow/errors.hpp"

namespace smaflow {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(int lineno, const std::string& what) {
    throw ConfigError("config line " + std::to_string(lineno) + ": " + what);
}

struct Value {
    std::string raw;
    int lineno;

    double number() const {
        char* end = nullptr;
        const double v = std::strtod(raw.c_str(), &end);
        if (end == raw.c_str() || *end != '\0') fail(lineno, "expected a number, got '" + raw + "'");
        return v;
    }
    int integer() const {
        const double v = number();
        if (v != std::floor(v) || std::abs(v) > 2e9)
            fail(lineno, "expected an integer, got '" + raw + "'");
        return static_cast<int>(v);
    }
    bool boolean() const {
        if (raw == "true") return true;
        if (raw == "false") return false;
        fail(lineno, "expected true or false, got '" + raw + "'");
    }
    std::string str() const {
        if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
            return raw.substr(1, raw.size() - 2);
        return raw;  // bare words accepted for enum-like keys
    }
};

}  // namespace

SimConfig parse_config(const std::string& text) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        // comments start at an unquoted '#'
        bool quoted = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "mesh" && section != "material" && section != "time" &&
                section != "solver" && section != "load" && section != "initial" &&
                section != "output" && section != "material_point")
                fail(lineno, "unknown section '" + section + "'");
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const Value val{trim(line.substr(eq + 1)), lineno};
        if (key.empty() || val.raw.empty()) fail(lineno, "expected 'key = value'");
        if (section.empty()) fail(lineno, "key '" + key + "' outside any section");

        MaterialParams& mp = cfg.material;
        if (section == "mesh") {
            if (key == "nx") cfg.nx = val.integer();
            else if (key == "ny") cfg.ny = val.integer();
            else if (key == "Lx") cfg.Lx = val.number();
            else if (key == "Ly") cfg.Ly = val.number();
            else fail(lineno, "unknown key 'mesh." + key + "'");
        } else if (section == "material") {
            if (key == "mu") mp.mu = val.number();
            else if (key == "lambda") mp.lambda = val.number();
            else if (key == "eta_u") mp.eta_u = val.number();
            else if (key == "eta_z") mp.eta_z = val.number();
            else if (key == "nu") mp.nu = val.number();
            else if (key == "alpha") mp.alpha = val.number();
            else if (key == "rho") mp.rho = val.number();
            else if (key == "c1") mp.c1 = val.number();
            else if (key == "c2") mp.c2 = val.number();
            else if (key == "c3") mp.c3 = val.number();
            else if (key == "delta") mp.delta = val.number();
            else if (key == "c1_hat") mp.c1_hat = val.number();
            else if (key == "c2_hat") mp.c2_hat = val.number();
            else if (key == "cc") mp.cc = val.number();
            else if (key == "beta1") mp.beta1 = val.number();
            else if (key == "k0") mp.k0 = val.number();
            else if (key == "vartheta_bar") mp.vartheta_bar = val.number();
            else fail(lineno, "unknown key 'material." + key + "'");
        } else if (section == "time") {
            if (key == "dt") cfg.dt = val.number();
            else if (key == "t_end") cfg.t_end = val.number();
            else fail(lineno, "unknown key 'time." + key + "'");
        } else if (section == "solver") {
            if (key == "tol_outer") cfg.mech.tol_outer = val.number();
            else if (key == "tol_z") cfg.mech.tol_z = val.number();
            else if (key == "max_outer") cfg.mech.max_outer = val.integer();
            else if (key == "max_prox_iters") cfg.mech.max_prox_iters = val.integer();
            else if (key == "backtracking") cfg.mech.backtracking = val.boolean();
            else if (key == "lin_tol") cfg.mech.lin_tol = val.number();
            else if (key == "thermal_lin_tol") cfg.thermal.lin_tol = val.number();
            else if (key == "lumped_mass") cfg.thermal.lumped_mass = val.boolean();
            else if (key == "tol_couple") cfg.tol_couple = val.number();
            else if (key == "max_fp_iters") cfg.max_fp_iters = val.integer();
            else if (key == "omega") cfg.omega = val.number();
            else fail(lineno, "unknown key 'solver." + key + "'");
        } else if (section == "load") {
            if (key == "law") {
                const std::string s = val.str();
                if (s == "constant") cfg.load.law = LoadLaw::Constant;
                else if (s == "sine") cfg.load.law = LoadLaw::Sine;
                else fail(lineno, "load.law must be constant or sine");
            } else if (key == "amplitude") cfg.load.amplitude = val.number();
            else if (key == "period") cfg.load.period = val.number();
            else if (key == "dir_x") cfg.load.dir_x = val.number();
            else if (key == "dir_y") cfg.load.dir_y = val.number();
            else fail(lineno, "unknown key 'load." + key + "'");
        } else if (section == "initial") {
            if (key == "vartheta0") cfg.vartheta0 = val.number();
            else if (key == "z0_a") cfg.z0.a = val.number();
            else if (key == "z0_b") cfg.z0.b = val.number();
            else fail(lineno, "unknown key 'initial." + key + "'");
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = val.str();
            else if (key == "snapshot_stride") cfg.snapshot_stride = val.integer();
            else fail(lineno, "unknown key 'output." + key + "'");
        } else if (section == "material_point") {
            MaterialPointConfig& mpc = cfg.material_point;
            if (key == "mode") mpc.mode = val.str();
            else if (key == "theta0") mpc.theta0 = val.number();
            else if (key == "dev_amp") mpc.dev_amp = val.number();
            else if (key == "shear_amp") mpc.shear_amp = val.number();
            else if (key == "vol_amp") mpc.vol_amp = val.number();
            else if (key == "shear_phase") mpc.shear_phase = val.number();
            else if (key == "period") mpc.period = val.number();
            else if (key == "cycles") mpc.cycles = val.integer();
            else if (key == "steps_per_cycle") mpc.steps_per_cycle = val.integer();
            else fail(lineno, "unknown key 'material_point." + key + "'");
        }
    }

    const auto viol = validate_config(cfg);
    if (!viol.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& v : viol) msg += "\n  " + v;
        throw ConfigError(msg);
    }
    return cfg;
}

std::vector<std::string> validate_config(const SimConfig& cfg) {
    std::vector<std::string> v = validate_params(cfg.material);
    auto req = [&v](bool ok, const std::string& msg) {
        if (!ok) v.push_back(msg);
    };
    req(cfg.nx >= 1 && cfg.ny >= 1, "mesh.nx and mesh.ny must be >= 1");
    req(cfg.Lx > 0.0 && cfg.Ly > 0.0, "mesh.Lx and mesh.Ly must be > 0");
    req(cfg.dt > 0.0, "time.dt must be > 0");
    req(cfg.t_end >= 0.0, "time.t_end must be >= 0");
    req(cfg.mech.tol_outer > 0.0 && cfg.mech.tol_outer < 1.0, "solver.tol_outer must lie in (0,1)");
    req(cfg.mech.tol_z > 0.0 && cfg.mech.tol_z < 1.0, "solver.tol_z must lie in (0,1)");
    req(cfg.mech.lin_tol > 0.0 && cfg.mech.lin_tol < 1.0, "solver.lin_tol must lie in (0,1)");
    req(cfg.mech.max_outer >= 1, "solver.max_outer must be >= 1");
    req(cfg.mech.max_prox_iters >= 1, "solver.max_prox_iters must be >= 1");
    req(cfg.thermal.lin_tol > 0.0 && cfg.thermal.lin_tol < 1.0,
        "solver.thermal_lin_tol must lie in (0,1)");
    req(cfg.tol_couple > 0.0 && cfg.tol_couple < 1.0, "solver.tol_couple must lie in (0,1)");
    req(cfg.max_fp_iters >= 1, "solver.max_fp_iters must be >= 1");
    req(cfg.omega > 0.0 && cfg.omega <= 1.0, "solver.omega must lie in (0,1]");
    req(cfg.load.period > 0.0, "load.period must be > 0");
    req(cfg.vartheta0 > 0.0, "initial.vartheta0 must be > 0 (initial enthalpy is strictly positive)");
    req(cfg.vartheta0 >= cfg.material.vartheta_bar,
        "initial.vartheta0 must be >= material.vartheta_bar");
    req(cfg.snapshot_stride >= 1, "output.snapshot_stride must be >= 1");
    const MaterialPointConfig& mpc = cfg.material_point;
    req(mpc.mode == "isothermal" || mpc.mode == "adiabatic",
        "material_point.mode must be isothermal or adiabatic");
    req(mpc.theta0 > 0.0, "material_point.theta0 must be > 0");
    req(mpc.period > 0.0, "material_point.period must be > 0");
    req(mpc.cycles >= 1, "material_point.cycles must be >= 1");
    req(mpc.steps_per_cycle >= 1, "material_point.steps_per_cycle must be >= 1");
    return v;
}

}  // namespace smaflow
