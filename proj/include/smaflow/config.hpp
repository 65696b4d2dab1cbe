#pragma once

#include <string>
#include <vector>

#include "smaflow/constitutive.hpp"
#include "smaflow/mech.hpp"
#include "smaflow/thermal.hpp"

namespace smaflow {

enum class LoadLaw { Constant, Sine };

// Body force l(x,t) = amplitude * q(t) * sin(pi x / Lx) sin(pi y / Ly) * dir,
// with q = 1 for Constant and q = sin(2 pi t / period) for Sine. The spatial
// bump is smooth and vanishes on the boundary.
struct LoadConfig {
    LoadLaw law = LoadLaw::Sine;
    double amplitude = 1.0;
    double period = 1.0;
    double dir_x = 1.0;
    double dir_y = 0.0;
};

struct MaterialPointConfig {
    std::string mode = "isothermal";  // or "adiabatic"
    double theta0 = 1.0;              // isothermal temperature / initial adiabatic temperature
    double dev_amp = 0.0;             // e_xx = -e_yy amplitude
    double shear_amp = 0.0;           // e_xy amplitude
    double vol_amp = 0.0;             // tr(e)/2 amplitude
    double shear_phase = 0.0;
    double period = 1.0;
    int cycles = 2;
    int steps_per_cycle = 2000;
};

struct SimConfig {
    // mesh
    int nx = 32, ny = 32;
    double Lx = 1.0, Ly = 1.0;
    // material
    MaterialParams material;
    // time
    double dt = 0.005;
    double t_end = 1.0;
    // solver
    MechConfig mech;
    ThermalConfig thermal;
    double tol_couple = 1e-9;
    int max_fp_iters = 60;
    double omega = 1.0;
    // load
    LoadConfig load;
    // initial state (u0 = 0 on the clamped boundary problem)
    double vartheta0 = 1.0;
    DevTensor z0;
    // output
    std::string out_dir;          // empty disables file output
    int snapshot_stride = 50;
    // 0-D driver
    MaterialPointConfig material_point;
};

// Parses the TOML-style key/value text (sections, numbers, strings, booleans,
// # comments). Throws ConfigError with a line number on malformed input and
// with the list of named constraint violations on invalid values.
SimConfig parse_config(const std::string& text);

// Validation only: every violated constraint by name; empty means valid.
std::vector<std::string> validate_config(const SimConfig& cfg);

}  // namespace smaflow
