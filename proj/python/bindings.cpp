#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smaflow/config.hpp"
#include "smaflow/coupler.hpp"
#include "smaflow/errors.hpp"

namespace py = pybind11;
using namespace smaflow;

namespace {

py::dict ledger_to_dict(const AuditLedger& ledger) {
    const size_t n = ledger.rows.size();
    std::vector<double> t(n), E_mech(n), E_th(n), W_ext(n), D_cum(n), entropy(n),
        entropy_prod(n), min_theta(n), max_theta(n), energy_residual(n), phi_floor(n),
        min_vartheta(n), conservation_defect(n);
    std::vector<int> coupler_iters(n);
    for (size_t k = 0; k < n; ++k) {
        const AuditRow& r = ledger.rows[k];
        t[k] = r.t;
        E_mech[k] = r.E_mech;
        E_th[k] = r.E_th;
        W_ext[k] = r.W_ext;
        D_cum[k] = r.D_cum;
        entropy[k] = r.entropy;
        entropy_prod[k] = r.entropy_prod;
        min_theta[k] = r.min_theta;
        max_theta[k] = r.max_theta;
        coupler_iters[k] = r.coupler_iters;
        energy_residual[k] = r.energy_residual;
        phi_floor[k] = r.phi_floor;
        min_vartheta[k] = r.min_vartheta;
        conservation_defect[k] = r.conservation_defect;
    }
    py::dict d;
    d["t"] = t;
    d["E_mech"] = E_mech;
    d["E_th"] = E_th;
    d["W_ext"] = W_ext;
    d["D_cum"] = D_cum;
    d["entropy"] = entropy;
    d["entropy_prod"] = entropy_prod;
    d["min_theta"] = min_theta;
    d["max_theta"] = max_theta;
    d["coupler_iters"] = coupler_iters;
    d["energy_residual"] = energy_residual;
    d["phi_floor"] = phi_floor;
    d["min_vartheta"] = min_vartheta;
    d["conservation_defect"] = conservation_defect;
    return d;
}

}  // namespace

PYBIND11_MODULE(_smaflow, m) {
    m.doc() = "thermo-mechanical phase-transformation simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<DevTensor>(m, "DevTensor")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("a"), py::arg("b"))
        .def_readwrite("a", &DevTensor::a)
        .def_readwrite("b", &DevTensor::b)
        .def("norm", &DevTensor::norm)
        .def("__repr__", [](const DevTensor& z) {
            return "DevTensor(a=" + std::to_string(z.a) + ", b=" + std::to_string(z.b) + ")";
        });

    py::class_<SymTensor>(m, "SymTensor")
        .def(py::init<>())
        .def(py::init<double, double, double>(), py::arg("xx"), py::arg("xy"), py::arg("yy"))
        .def_readwrite("xx", &SymTensor::xx)
        .def_readwrite("xy", &SymTensor::xy)
        .def_readwrite("yy", &SymTensor::yy)
        .def("trace", &SymTensor::trace);

    py::class_<MaterialParams>(m, "MaterialParams")
        .def(py::init<>())
        .def_readwrite("mu", &MaterialParams::mu)
        .def_readwrite("lambda_", &MaterialParams::lambda)
        .def_readwrite("eta_u", &MaterialParams::eta_u)
        .def_readwrite("eta_z", &MaterialParams::eta_z)
        .def_readwrite("nu", &MaterialParams::nu)
        .def_readwrite("alpha", &MaterialParams::alpha)
        .def_readwrite("rho", &MaterialParams::rho)
        .def_readwrite("c1", &MaterialParams::c1)
        .def_readwrite("c2", &MaterialParams::c2)
        .def_readwrite("c3", &MaterialParams::c3)
        .def_readwrite("delta", &MaterialParams::delta)
        .def_readwrite("c1_hat", &MaterialParams::c1_hat)
        .def_readwrite("c2_hat", &MaterialParams::c2_hat)
        .def_readwrite("cc", &MaterialParams::cc)
        .def_readwrite("beta1", &MaterialParams::beta1)
        .def_readwrite("k0", &MaterialParams::k0)
        .def_readwrite("vartheta_bar", &MaterialParams::vartheta_bar);

    py::class_<HardeningEval>(m, "HardeningEval")
        .def_readonly("value", &HardeningEval::value)
        .def_readonly("grad", &HardeningEval::grad);

    py::class_<MaterialPointConfig>(m, "MaterialPointConfig")
        .def(py::init<>())
        .def_readwrite("mode", &MaterialPointConfig::mode)
        .def_readwrite("theta0", &MaterialPointConfig::theta0)
        .def_readwrite("dev_amp", &MaterialPointConfig::dev_amp)
        .def_readwrite("shear_amp", &MaterialPointConfig::shear_amp)
        .def_readwrite("vol_amp", &MaterialPointConfig::vol_amp)
        .def_readwrite("shear_phase", &MaterialPointConfig::shear_phase)
        .def_readwrite("period", &MaterialPointConfig::period)
        .def_readwrite("cycles", &MaterialPointConfig::cycles)
        .def_readwrite("steps_per_cycle", &MaterialPointConfig::steps_per_cycle);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("nx", &SimConfig::nx)
        .def_readwrite("ny", &SimConfig::ny)
        .def_readwrite("Lx", &SimConfig::Lx)
        .def_readwrite("Ly", &SimConfig::Ly)
        .def_readwrite("material", &SimConfig::material)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_end", &SimConfig::t_end)
        .def_readwrite("tol_couple", &SimConfig::tol_couple)
        .def_readwrite("max_fp_iters", &SimConfig::max_fp_iters)
        .def_readwrite("omega", &SimConfig::omega)
        .def_readwrite("vartheta0", &SimConfig::vartheta0)
        .def_readwrite("out_dir", &SimConfig::out_dir)
        .def_readwrite("snapshot_stride", &SimConfig::snapshot_stride)
        .def_readwrite("material_point", &SimConfig::material_point);

    m.def("validate_params", &validate_params, py::arg("params"));
    m.def("g_of_theta", &g_of_theta, py::arg("params"), py::arg("theta"));
    m.def("zeta_of_enthalpy", &zeta_of_enthalpy, py::arg("params"), py::arg("vartheta"));
    m.def("heat_capacity", &heat_capacity, py::arg("params"), py::arg("theta"));
    m.def("entropy_coefficient", &entropy_coefficient, py::arg("params"), py::arg("theta"));
    m.def("hardening_H1", &hardening_H1, py::arg("params"), py::arg("z"));
    m.def("hardening_H2", &hardening_H2, py::arg("params"), py::arg("z"));
    m.def("psi", &psi, py::arg("params"), py::arg("v"));
    m.def("prox_flow", &prox_flow, py::arg("params"), py::arg("r"), py::arg("dt"),
          py::arg("m_w"));
    m.def("shrink", &shrink, py::arg("q"), py::arg("rho"), py::arg("coef"));

    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("validate_config", &validate_config, py::arg("config"));

    m.def(
        "run",
        [](const SimConfig& cfg) {
            const RunResult res = run(cfg);
            py::dict out = ledger_to_dict(res.ledger);
            py::dict fin;
            fin["t"] = res.final_state.t;
            fin["u"] = res.final_state.mech.u;
            std::vector<double> za, zb;
            za.reserve(res.final_state.mech.z.size());
            zb.reserve(res.final_state.mech.z.size());
            for (const DevTensor& z : res.final_state.mech.z) {
                za.push_back(z.a);
                zb.push_back(z.b);
            }
            fin["z_a"] = za;
            fin["z_b"] = zb;
            fin["vartheta"] = res.final_state.vartheta;
            out["final"] = fin;
            return out;
        },
        py::arg("config"), "March the scenario and return the audit ledger as column lists.");

    m.def(
        "material_point_run",
        [](const MaterialParams& p, const MaterialPointConfig& path, double dt, double t_end) {
            const MaterialPointResult r = material_point_run(p, path, dt, t_end);
            py::dict out;
            out["t"] = r.t;
            std::vector<double> exx, exy, eyy, za, zb, sxx, sxy, syy;
            for (size_t n = 0; n < r.t.size(); ++n) {
                exx.push_back(r.strain[n].xx);
                exy.push_back(r.strain[n].xy);
                eyy.push_back(r.strain[n].yy);
                za.push_back(r.z[n].a);
                zb.push_back(r.z[n].b);
                sxx.push_back(r.stress[n].xx);
                sxy.push_back(r.stress[n].xy);
                syy.push_back(r.stress[n].yy);
            }
            out["e_xx"] = exx;
            out["e_xy"] = exy;
            out["e_yy"] = eyy;
            out["z_a"] = za;
            out["z_b"] = zb;
            out["s_xx"] = sxx;
            out["s_xy"] = sxy;
            out["s_yy"] = syy;
            out["theta"] = r.theta;
            out["vartheta"] = r.vartheta;
            out["D_cum"] = r.D_cum;
            out["loop_area"] = r.loop_area;
            out["loop_dissipation"] = r.loop_dissipation;
            return out;
        },
        py::arg("params"), py::arg("path"), py::arg("dt"), py::arg("t_end"),
        "Drive the 0-D material point and return the trace as column lists.");
}
