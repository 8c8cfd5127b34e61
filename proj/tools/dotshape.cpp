// Command-line front end: experiment presets in, reconstruction artifacts out.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dotshape/config.hpp"
#include "dotshape/errors.hpp"
#include "dotshape/io.hpp"
#include "dotshape/sensitivity.hpp"
#include "dotshape/threading.hpp"

namespace fs = std::filesystem;
using namespace dotshape;

#ifndef DOTSHAPE_VERSION
#define DOTSHAPE_VERSION "0.0.0"
#endif

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out = "out";
    int threads = 1;
    bool seedless = true;
    int sweeps = -1;         // override when >= 0
    int snapshot_every = 0;  // override when > 0
};

void add_common(CLI::App* cmd, CommonOpts& o, bool wants_sweeps = false) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--preset", o.preset, "built-in preset: exp1, exp2 or exp3");
    cmd->add_option("--out", o.out, "output directory (default: out)");
    cmd->add_option("--threads", o.threads, "worker threads; never changes results")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--seedless", o.seedless,
                  "accepted for symmetry; every run is deterministic anyway");
    if (wants_sweeps) {
        cmd->add_option("--sweeps", o.sweeps, "override the sweep count");
        cmd->add_option("--snapshot-every", o.snapshot_every,
                        "snapshot every N TBT sweeps / level-set steps");
    }
}

PipelineConfig load_config(const CommonOpts& o) {
    if (!o.config_path.empty() && !o.preset.empty())
        throw ConfigError("give either --config or --preset, not both");
    if (!o.config_path.empty()) return parse_config(o.config_path);
    if (!o.preset.empty()) return preset_config(o.preset);
    throw ConfigError("one of --config or --preset is required");
}

std::vector<int> every_n(int n, int last) {
    std::vector<int> out;
    for (int k = n; k <= last; k += n) out.push_back(k);
    return out;
}

void apply_overrides(PipelineConfig& cfg, const CommonOpts& o, const std::string& command) {
    if (o.sweeps >= 0) {
        if (command == "tbt")
            cfg.tbt.sweeps = o.sweeps;
        else
            cfg.levelset.sweeps = o.sweeps;
    }
    if (o.snapshot_every > 0) {
        cfg.tbt.snapshot_sweeps = every_n(o.snapshot_every, cfg.tbt.sweeps);
        cfg.levelset.snapshot_steps =
            every_n(o.snapshot_every, cfg.levelset.sweeps * (int)cfg.sources.size());
    }
}

/// Collects output files and timings; flushes the manifest even on
/// numerical failure so partial runs stay inspectable.
class Emitter {
  public:
    Emitter(const std::string& command, const PipelineConfig& cfg, const CommonOpts& o)
        : out_(o.out), t0_(std::chrono::steady_clock::now()) {
        fs::create_directories(out_);
        man_.command = command;
        man_.version = DOTSHAPE_VERSION;
        man_.config_text = config_to_text(cfg);
        man_.config_hash = config_hash(cfg);
        man_.threads = o.threads;
    }

    std::string path(const std::string& name) { return (out_ / name).string(); }

    void field(const ScalarField& f, double dx, const std::string& stem,
               const std::string& units = "") {
        write_field_raw(f, dx, path(stem + ".raw"), units);
        note(stem + ".raw");
        note(stem + ".raw.json");
        write_field_pgm(f, path(stem + ".pgm"));
        note(stem + ".pgm");
    }

    void mask(const MaskField& m, const std::string& stem) {
        write_mask_pgm(m, path(stem + ".pgm"));
        note(stem + ".pgm");
    }

    void trace(const BoundaryFluxTrace& t, const BoundaryGeometry& b, const std::string& name) {
        write_trace_csv(t, b, path(name));
        note(name);
    }

    void steps(const std::vector<StepRecord>& s, const std::string& name) {
        write_step_log_csv(s, path(name));
        note(name);
    }

    void sweeps(const std::vector<SweepRecord>& s, const std::string& name) {
        write_sweep_log_csv(s, path(name));
        note(name);
    }

    void note(const std::string& name) { man_.files.push_back(name); }

    void constant(const std::string& key, const std::string& value) {
        man_.constants.emplace_back(key, value);
    }
    void constant(const std::string& key, double value) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        constant(key, std::string(buf));
    }

    void timing(const std::string& key) {
        const auto now = std::chrono::steady_clock::now();
        man_.timings_s.emplace_back(key, std::chrono::duration<double>(now - tmark_).count());
        tmark_ = now;
    }

    void flush(const std::string& status) {
        man_.status = status;
        man_.timings_s.emplace_back(
            "total", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count());
        write_manifest(man_, path("manifest.json"));
    }

  private:
    fs::path out_;
    RunManifest man_;
    std::chrono::steady_clock::time_point t0_;
    std::chrono::steady_clock::time_point tmark_ = std::chrono::steady_clock::now();
};

std::string step_stem(const char* prefix, int k) {
    return std::string(prefix) + std::to_string(k);
}

int cmd_phantom(const PipelineConfig& cfg, Emitter& em) {
    const Experiment exp = build_experiment(cfg);
    em.field(exp.truth.a, cfg.grid.dx, "a_true", "1/cm");
    em.field(exp.truth.b, cfg.grid.dx, "b", "1/cm");
    em.field(exp.base.a, cfg.grid.dx, "a_base", "1/cm");
    em.mask(exp.truth.clear_mask, "clear_mask");
    em.mask(exp.truth.frozen_mask, "frozen_mask");
    em.timing("phantom");
    return 0;
}

int cmd_forward(const PipelineConfig& cfg, Emitter& em, int source) {
    const Experiment exp = build_experiment(cfg);
    if (source < 0 || source >= (int)exp.problem.channels.size())
        throw ConfigError("forward: --source outside the source list");
    const SourceChannel& ch = exp.problem.channels[source];

    SolveStats stats;
    const AngularFluxHistory u = forward_solve(exp.truth, exp.problem.kernel, exp.problem.quad,
                                               cfg.time, ch.source, HistoryStore::Recorded, &stats);
    const BoundaryFluxTrace full = measure(u, exp.problem.boundary, exp.problem.quad);
    em.trace(full, exp.problem.boundary, "trace_full.csv");
    em.trace(apply_mask(full, ch.window), exp.problem.boundary, "trace_masked.csv");
    em.constant("injected_mass", stats.injected.back());
    em.constant("outflow_mass", stats.outflow.back());
    em.constant("interior_mass", state_mass(u, u.recorded_state(cfg.time.n_rec), exp.problem.quad));
    em.timing("forward");
    return 0;
}

int cmd_generate(const PipelineConfig& cfg, Emitter& em) {
    const Experiment exp = build_experiment(cfg);
    const TraceSet data = generate_data(exp.problem, exp.truth.a);
    for (std::size_t j = 0; j < data.size(); ++j)
        em.trace(data[j], exp.problem.boundary, step_stem("data_src", (int)j) + ".csv");
    em.timing("generate");
    return 0;
}

int cmd_tbt(const PipelineConfig& cfg, Emitter& em) {
    const Experiment exp = build_experiment(cfg);
    const TraceSet data = generate_data(exp.problem, exp.truth.a);
    em.timing("generate_data");

    const TbtResult tbt = run_tbt(exp.problem, exp.base.a, data, cfg.tbt);
    em.timing("tbt");

    em.field(tbt.a, cfg.grid.dx, "a_tbt", "1/cm");
    for (const auto& [sweep, a] : tbt.snapshots)
        em.field(a, cfg.grid.dx, step_stem("a_tbt_sweep", sweep), "1/cm");
    em.steps(tbt.steps, "tbt_steps.csv");
    em.constant("eta_tbt", tbt.eta);
    em.constant("residual_start", tbt.residual_start);
    em.constant("residual_end", tbt.residual_end);
    return 0;
}

int run_two_step(const PipelineConfig& cfg, Emitter& em, bool emit_tbt_artifacts) {
    const Experiment exp = build_experiment(cfg);
    const TraceSet data = generate_data(exp.problem, exp.truth.a);
    em.timing("generate_data");

    const PipelineResult res = run_pipeline(exp.problem, exp.base.a, data, cfg.tbt, cfg.levelset);
    em.timing("reconstruction");

    if (emit_tbt_artifacts) {
        em.field(res.tbt.a, cfg.grid.dx, "a_tbt", "1/cm");
        for (const auto& [sweep, a] : res.tbt.snapshots)
            em.field(a, cfg.grid.dx, step_stem("a_tbt_sweep", sweep), "1/cm");
        em.steps(res.tbt.steps, "tbt_steps.csv");
    }
    em.field(res.phi0, cfg.grid.dx, "phi0");
    for (const auto& [step, phi] : res.ls.snapshots)
        em.field(phi, cfg.grid.dx, step_stem("phi_step", step));
    em.field(res.ls.state.phi, cfg.grid.dx, "phi_final");
    em.field(res.ls.state.a, cfg.grid.dx, "a_final", "1/cm");
    em.mask(res.final_mask, "mask_final");
    em.steps(res.ls.steps, "ls_steps.csv");
    em.sweeps(res.ls.residuals, "ls_sweeps.csv");

    {
        std::ofstream comp(em.path("components.csv"));
        comp << "label,area_px,cx_px,cy_px\n";
        for (const ShapeComponent& c : res.components) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", c.label, c.area_px, c.cx, c.cy);
            comp << buf;
        }
        em.note("components.csv");
    }
    em.constant("eta_tbt", res.tbt.eta);
    em.constant("eta_ls", res.ls.eta);
    em.constant("tbt_residual_start", res.tbt.residual_start);
    em.constant("tbt_residual_end", res.tbt.residual_end);
    em.constant("ls_residual_init", res.ls.residuals.front().residual);
    em.constant("ls_residual_final", res.ls.residuals.back().residual);
    std::cout << "components: " << res.components.size()
              << "  residual: " << res.ls.residuals.back().residual << "\n";
    return 0;
}

int cmd_sensitivity(const PipelineConfig& cfg, Emitter& em) {
    const Experiment exp = build_experiment(cfg);
    const SensitivityConfig& sc = cfg.sensitivity;
    const TimeGrid tg(cfg.time.dt_rec, sc.n_rec, cfg.time.substeps, cfg.time.c);
    const ResolvedSource source = resolve_source(cfg.grid, exp.problem.boundary, exp.problem.quad,
                                                 tg, cfg.sources[sc.source_index]);
    const int receiver =
        find_boundary_pixel(exp.problem.boundary, sc.receiver_side, sc.receiver_px);

    // Sensitivity studies use the obstacle-free medium (the known background
    // with its clear regions), matching the clear-layer analysis setting.
    const AngularFluxHistory u = forward_solve(exp.base, exp.problem.kernel, exp.problem.quad, tg,
                                               source, HistoryStore::Substep);
    em.timing("forward");

    for (double t : sc.times) {
        const int step = (int)std::lround(t / tg.dt_rec);
        if (std::abs(step * tg.dt_rec - t) > 1e-9 * std::max(1.0, std::abs(t)))
            throw ConfigError("sensitivity: receiver time is not a recorded step");
        const ScalarField map = sensitivity_map_from(u, exp.base, exp.problem.kernel,
                                                     exp.problem.quad, tg, exp.problem.boundary,
                                                     receiver, step);
        char stem[48];
        std::snprintf(stem, sizeof stem, "sens_map_t%g", t);
        em.field(map, cfg.grid.dx, stem);
        const double frac = clear_layer_fraction(map, exp.base.clear_mask);
        char key[48];
        std::snprintf(key, sizeof key, "clear_layer_fraction_t%g", t);
        em.constant(key, frac);
        std::cout << key << " = " << frac << "\n";
    }
    em.timing("maps");
    return 0;
}

int cmd_residuals(const CommonOpts& o) {
    bool any = false;
    for (const char* name : {"tbt_steps.csv", "ls_steps.csv", "ls_sweeps.csv"}) {
        const fs::path p = fs::path(o.out) / name;
        std::ifstream in(p);
        if (!in) continue;
        any = true;
        std::cout << "# " << p.string() << "\n" << in.rdbuf() << "\n";
    }
    if (!any)
        throw ConfigError("residuals: no norm history found under " + o.out +
                          " (run tbt, levelset or pipeline first)");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shape reconstruction in scattering media: transport solver, "
                 "TBT initializer and level-set pipeline"};
    app.set_version_flag("--version", std::string("dotshape ") + DOTSHAPE_VERSION);
    app.require_subcommand(1);

    CommonOpts o;
    int forward_source = 0;
    std::string phi0_path;

    CLI::App* c_phantom = app.add_subcommand("phantom", "emit the truth medium fields");
    add_common(c_phantom, o);
    CLI::App* c_forward = app.add_subcommand("forward", "one forward solve, emit its trace");
    add_common(c_forward, o);
    c_forward->add_option("--source", forward_source, "source index (default 0)");
    CLI::App* c_generate = app.add_subcommand("generate", "emit the full synthetic data set");
    add_common(c_generate, o);
    CLI::App* c_tbt = app.add_subcommand("tbt", "run the transport-backtransport initializer");
    add_common(c_tbt, o, true);
    CLI::App* c_levelset =
        app.add_subcommand("levelset", "run the level-set phase (TBT init unless --phi0)");
    add_common(c_levelset, o, true);
    c_levelset->add_option("--phi0", phi0_path, "start from this raw level-set field");
    CLI::App* c_pipeline = app.add_subcommand("pipeline", "full two-step reconstruction");
    add_common(c_pipeline, o, true);
    CLI::App* c_sensitivity = app.add_subcommand("sensitivity", "emit sensitivity maps");
    add_common(c_sensitivity, o);
    CLI::App* c_residuals = app.add_subcommand("residuals", "re-emit norm histories from --out");
    c_residuals->add_option("--out", o.out, "directory of a previous run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion") {
            return app.exit(e);
        }
        app.exit(e);
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();

    try {
        set_thread_count(o.threads);
        if (command == "residuals") return cmd_residuals(o);

        PipelineConfig cfg = load_config(o);
        apply_overrides(cfg, o, command);
        Emitter em(command, cfg, o);

        int rc = 1;
        try {
            if (command == "phantom") rc = cmd_phantom(cfg, em);
            else if (command == "forward") rc = cmd_forward(cfg, em, forward_source);
            else if (command == "generate") rc = cmd_generate(cfg, em);
            else if (command == "tbt") rc = cmd_tbt(cfg, em);
            else if (command == "sensitivity") rc = cmd_sensitivity(cfg, em);
            else if (command == "levelset" || command == "pipeline") {
                if (!phi0_path.empty() && command == "levelset") {
                    // An explicit phi0 skips the TBT phase.
                    const Experiment exp = build_experiment(cfg);
                    const TraceSet data = generate_data(exp.problem, exp.truth.a);
                    em.timing("generate_data");
                    const ScalarField phi0 = read_field_raw(phi0_path).field;
                    const LevelSetRun ls =
                        run_levelset(exp.problem, exp.base.a, phi0, data, cfg.levelset);
                    em.timing("levelset");
                    em.field(ls.state.phi, cfg.grid.dx, "phi_final");
                    em.field(ls.state.a, cfg.grid.dx, "a_final", "1/cm");
                    em.mask(heaviside_map(ls.state.phi), "mask_final");
                    for (const auto& [step, phi] : ls.snapshots)
                        em.field(phi, cfg.grid.dx, step_stem("phi_step", step));
                    em.steps(ls.steps, "ls_steps.csv");
                    em.sweeps(ls.residuals, "ls_sweeps.csv");
                    em.constant("eta_ls", ls.eta);
                    rc = 0;
                } else {
                    rc = run_two_step(cfg, em, command == "pipeline");
                }
            }
        } catch (const NumericError& e) {
            em.flush(std::string("numerical-failure: ") + e.what());
            std::cerr << "dotshape: numerical failure: " << e.what() << "\n";
            return 3;
        }
        em.flush("ok");
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "dotshape: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "dotshape: numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "dotshape: " << e.what() << "\n";
        return 1;
    }
}
