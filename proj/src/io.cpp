#include "smaflow/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "smaflow/errors.hpp"

namespace smaflow {

namespace {

const char* kCsvHeader =
    "t,E_mech,E_th,W_ext,D_cum,entropy,entropy_prod,min_theta,max_theta,coupler_iters,"
    "energy_residual,phi_floor";

// 17 significant digits round-trips IEEE doubles exactly
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

}  // namespace

void write_timeseries(const AuditLedger& ledger, const std::string& path) {
    std::ofstream out = open_out(path);
    out << kCsvHeader << "\n";
    for (const auto& r : ledger.rows) {
        out << fmt(r.t) << ',' << fmt(r.E_mech) << ',' << fmt(r.E_th) << ',' << fmt(r.W_ext)
            << ',' << fmt(r.D_cum) << ',' << fmt(r.entropy) << ',' << fmt(r.entropy_prod) << ','
            << fmt(r.min_theta) << ',' << fmt(r.max_theta) << ',' << r.coupler_iters << ','
            << fmt(r.energy_residual) << ',' << fmt(r.phi_floor) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_snapshot(const Mesh& mesh, const CoupledState& state, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "# nodes " << mesh.n_nodes() << " triangles " << mesh.n_triangles() << "\n";
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        out << fmt(state.mech.u[2 * i]) << ' ' << fmt(state.mech.u[2 * i + 1]) << ' '
            << fmt(state.mech.z[i].a) << ' ' << fmt(state.mech.z[i].b) << ' '
            << fmt(state.vartheta[i]) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "# nodes " << mesh.n_nodes() << " triangles " << mesh.n_triangles() << "\n";
    for (const auto& p : mesh.nodes) out << fmt(p.x) << ' ' << fmt(p.y) << "\n";
    for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

AuditLedger read_timeseries(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty time series file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw std::runtime_error("unexpected time series header in " + path);

    AuditLedger ledger;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) parts.push_back(field);
        if (parts.size() != 12)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 12 columns");
        auto num = [&](int k) {
            char* end = nullptr;
            const double v = std::strtod(parts[k].c_str(), &end);
            if (end == parts[k].c_str() || *end != '\0')
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": bad number '" + parts[k] + "'");
            return v;
        };
        AuditRow r;
        r.t = num(0);
        r.E_mech = num(1);
        r.E_th = num(2);
        r.W_ext = num(3);
        r.D_cum = num(4);
        r.entropy = num(5);
        r.entropy_prod = num(6);
        r.min_theta = num(7);
        r.max_theta = num(8);
        r.coupler_iters = static_cast<int>(num(9));
        r.energy_residual = num(10);
        r.phi_floor = num(11);
        ledger.rows.push_back(r);
    }
    return ledger;
}

SnapshotData read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string hash, nodes_word, tris_word;
    SnapshotData d;
    if (!(in >> hash >> nodes_word >> d.n_nodes >> tris_word >> d.n_triangles) || hash != "#" ||
        nodes_word != "nodes" || tris_word != "triangles")
        throw std::runtime_error("bad snapshot header in " + path);
    d.u.resize(2 * d.n_nodes);
    d.z.resize(d.n_nodes);
    d.vartheta.resize(d.n_nodes);
    for (int i = 0; i < d.n_nodes; ++i) {
        if (!(in >> d.u[2 * i] >> d.u[2 * i + 1] >> d.z[i].a >> d.z[i].b >> d.vartheta[i]))
            throw std::runtime_error("truncated snapshot: " + path);
    }
    return d;
}

}  // namespace smaflow
