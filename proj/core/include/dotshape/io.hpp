#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dotshape/driver.hpp"

namespace dotshape {

/// Raw field file: 64-bit IEEE-754 little-endian, row-major with x fastest,
/// with a JSON sidecar at path + ".json" recording nx, ny, dx and units.
/// Non-finite values are rejected.
void write_field_raw(const ScalarField& f, double dx, const std::string& path,
                     const std::string& units = "");

struct RawField {
    ScalarField field;
    double dx = 0.0;
    std::string units;
};

/// Reads a raw field back via its sidecar; bit-identical round trip.
RawField read_field_raw(const std::string& path);

/// One CSV row per grid row (iy ascending), values comma-separated.
void write_field_csv(const ScalarField& f, const std::string& path);

/// 8-bit P5 preview, linear min-max scale, top image row = top of the
/// domain. Constant fields map to a single mid gray.
void write_field_pgm(const ScalarField& f, const std::string& path);
void write_mask_pgm(const MaskField& m, const std::string& path);

/// Data interchange format: header arc,time,value then one row per masked
/// receiver and windowed recorded step.
void write_trace_csv(const BoundaryFluxTrace& trace, const BoundaryGeometry& boundary,
                     const std::string& path);

/// Kaczmarz step log: step,sweep,source,residual_norm.
void write_step_log_csv(const std::vector<StepRecord>& steps, const std::string& path);

/// Full-model residual log: sweep,residual_norm (sweep 0 = initial state).
void write_sweep_log_csv(const std::vector<SweepRecord>& sweeps, const std::string& path);

/// Run metadata: the canonical config, its hash, resolved constants, every
/// file the run emitted, wall-clock timings.
struct RunManifest {
    std::string command;
    std::string version;
    std::string config_text;
    std::uint64_t config_hash = 0;
    int threads = 1;
    std::string status = "ok";
    std::vector<std::pair<std::string, std::string>> constants;
    std::vector<std::string> files;
    std::vector<std::pair<std::string, double>> timings_s;
};

void write_manifest(const RunManifest& m, const std::string& path);

} // namespace dotshape
