#include "dotshape/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dotshape/errors.hpp"

namespace dotshape {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw ConfigError("io: cannot write " + path);
    return out;
}

void check_finite_field(const ScalarField& f, const std::string& path) {
    for (int c = 0; c < f.nx() * f.ny(); ++c)
        if (!std::isfinite(f[c])) throw NumericError("io: non-finite value writing " + path);
}

void append_f64_le(std::string& buf, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf.push_back(char((bits >> (8 * i)) & 0xff));
}

double read_f64_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_field_raw(const ScalarField& f, double dx, const std::string& path,
                     const std::string& units) {
    check_finite_field(f, path);
    std::string buf;
    buf.reserve(f.size() * 8);
    for (int c = 0; c < f.nx() * f.ny(); ++c) append_f64_le(buf, f[c]);
    open_out(path, true).write(buf.data(), (std::streamsize)buf.size());

    json side{{"nx", f.nx()}, {"ny", f.ny()}, {"dx", dx}, {"units", units}};
    open_out(path + ".json", false) << side.dump(2) << "\n";
}

RawField read_field_raw(const std::string& path) {
    std::ifstream side_in(path + ".json");
    if (!side_in) throw ConfigError("io: cannot read sidecar " + path + ".json");
    json side;
    try {
        side_in >> side;
    } catch (const json::parse_error& e) {
        throw ConfigError("io: bad sidecar " + path + ".json: " + e.what());
    }
    if (!side.contains("nx") || !side.contains("ny"))
        throw ConfigError("io: sidecar missing nx/ny: " + path + ".json");

    RawField out;
    const int nx = side.at("nx").get<int>();
    const int ny = side.at("ny").get<int>();
    out.dx = side.value("dx", 0.0);
    out.units = side.value("units", "");
    out.field = ScalarField(nx, ny, 0.0);

    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("io: cannot read " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() != (std::size_t)nx * ny * 8)
        throw ConfigError("io: size mismatch reading " + path);
    for (int c = 0; c < nx * ny; ++c)
        out.field[c] = read_f64_le((const unsigned char*)buf.data() + (std::size_t)c * 8);
    return out;
}

void write_field_csv(const ScalarField& f, const std::string& path) {
    check_finite_field(f, path);
    std::ofstream out = open_out(path, false);
    for (int iy = 0; iy < f.ny(); ++iy) {
        for (int ix = 0; ix < f.nx(); ++ix) {
            if (ix) out << ',';
            out << fmt_num(f(ix, iy));
        }
        out << '\n';
    }
}

void write_field_pgm(const ScalarField& f, const std::string& path) {
    check_finite_field(f, path);
    double lo = f[0];
    double hi = f[0];
    for (int c = 0; c < f.nx() * f.ny(); ++c) {
        lo = std::min(lo, f[c]);
        hi = std::max(hi, f[c]);
    }
    std::string buf;
    buf.reserve(f.size());
    for (int iy = f.ny() - 1; iy >= 0; --iy)
        for (int ix = 0; ix < f.nx(); ++ix) {
            int v = 128;
            if (hi > lo) v = (int)std::lround((f(ix, iy) - lo) / (hi - lo) * 255.0);
            buf.push_back(char(v < 0 ? 0 : (v > 255 ? 255 : v)));
        }
    std::ofstream out = open_out(path, true);
    out << "P5\n" << f.nx() << " " << f.ny() << "\n255\n";
    out.write(buf.data(), (std::streamsize)buf.size());
}

void write_mask_pgm(const MaskField& m, const std::string& path) {
    std::string buf;
    buf.reserve(m.size());
    for (int iy = m.ny() - 1; iy >= 0; --iy)
        for (int ix = 0; ix < m.nx(); ++ix) buf.push_back(m(ix, iy) ? char(255) : char(0));
    std::ofstream out = open_out(path, true);
    out << "P5\n" << m.nx() << " " << m.ny() << "\n255\n";
    out.write(buf.data(), (std::streamsize)buf.size());
}

void write_trace_csv(const BoundaryFluxTrace& trace, const BoundaryGeometry& boundary,
                     const std::string& path) {
    if (trace.n_boundary != boundary.count())
        throw ConfigError("io: trace does not match the boundary walk");
    std::ofstream out = open_out(path, false);
    out << "arc,time,value\n";
    for (int r = 0; r < trace.n_boundary; ++r) {
        if (!trace.receiver_mask.empty() && !trace.receiver_mask[r]) continue;
        for (int i = trace.window_start; i <= trace.n_rec; ++i)
            out << fmt_num(boundary.pixels[r].arc) << ',' << fmt_num(i * trace.dt_rec) << ','
                << fmt_num(trace.at(r, i)) << '\n';
    }
}

void write_step_log_csv(const std::vector<StepRecord>& steps, const std::string& path) {
    std::ofstream out = open_out(path, false);
    out << "step,sweep,source,residual_norm\n";
    for (const StepRecord& s : steps)
        out << s.step << ',' << s.sweep << ',' << s.source << ',' << fmt_num(s.resid_norm) << '\n';
}

void write_sweep_log_csv(const std::vector<SweepRecord>& sweeps, const std::string& path) {
    std::ofstream out = open_out(path, false);
    out << "sweep,residual_norm\n";
    for (const SweepRecord& s : sweeps) out << s.sweep << ',' << fmt_num(s.residual) << '\n';
}

void write_manifest(const RunManifest& m, const std::string& path) {
    json j;
    j["command"] = m.command;
    j["version"] = m.version;
    j["status"] = m.status;
    j["threads"] = m.threads;
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)m.config_hash);
    j["config_hash"] = hex;
    try {
        j["config"] = json::parse(m.config_text);
    } catch (const json::parse_error&) {
        j["config"] = m.config_text;
    }
    json consts = json::object();
    for (const auto& [k, v] : m.constants) consts[k] = v;
    j["constants"] = consts;
    j["files"] = m.files;
    json times = json::object();
    for (const auto& [k, v] : m.timings_s) times[k] = v;
    j["timings_s"] = times;
    open_out(path, false) << j.dump(2) << "\n";
}

} // namespace dotshape
