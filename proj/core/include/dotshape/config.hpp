#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dotshape/driver.hpp"
#include "dotshape/medium.hpp"

namespace dotshape {

/// Geometry for the sensitivity-map batch: one source from the source list,
/// one receiver pixel, a list of receiver times on its own (usually longer)
/// horizon.
struct SensitivityConfig {
    int source_index = 0;
    Side receiver_side = Side::Top;
    int receiver_px = 0;
    std::vector<double> times;
    int n_rec = 120;
};

/// Everything a run needs. Defaults mirror the desk-scale setting the
/// presets are built on; parse_config overrides from JSON.
struct PipelineConfig {
    GridSpec grid{50, 50, 0.1};
    int n_dirs = 12;
    double g = 0.9;
    TimeGrid time{0.2, 100, 4, 1.0};
    std::vector<SourceSpec> sources;
    double min_arc = 5.0;          // receiver offset along the boundary [cm]
    double window_t_min = 8.0;     // measurements before this time are ignored [s]
    PhantomSpec phantom;
    TbtParams tbt;
    LevelSetParams levelset;
    SensitivityConfig sensitivity;
};

/// Strict JSON parsing: unknown keys and type mismatches are rejected with
/// the offending path; missing required keys (grid, time, sources) too.
PipelineConfig parse_config(const std::string& path);
PipelineConfig parse_config_text(const std::string& text);

/// Canonical serialized form (sorted keys, all defaults materialized).
/// parse(serialize(c)) reproduces c exactly.
std::string config_to_text(const PipelineConfig& cfg);

/// FNV-1a over the canonical form; stable under key reordering.
std::uint64_t config_hash(const PipelineConfig& cfg);

/// exp1, exp2, exp3.
PipelineConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

const char* side_name(Side s);
Side side_parse(const std::string& name);

/// The fully built runtime setting a config describes.
struct Experiment {
    Problem problem;
    MediumFields truth;    // phantom with obstacles
    MediumFields base;     // same phantom without obstacles
};

Experiment build_experiment(const PipelineConfig& cfg);

} // namespace dotshape
