#pragma once

#include <utility>
#include <vector>

#include "dotshape/levelset.hpp"
#include "dotshape/problem.hpp"
#include "dotshape/tbt.hpp"

namespace dotshape {

struct LevelSetParams {
    ShapeParams shape;
    int sweeps = 1;
    double eta = 0.0;          // fixed step size; 0 resolves it from the first update
    double eta_target = 0.5;   // largest first |delta phi| when auto (phi units)
    double max_step = 1.0;     // per-step cap on |delta phi|; 0 disables
    std::vector<int> snapshot_steps;   // 1-based global step indices to snapshot after
    bool stop_on_plateau = false;      // optional early stop on stalled residuals
    double plateau_tol = 1e-3;
};

/// Shape iterate: the level-set function and the absorption field implied by
/// it, a = a_base + lambda_map(phi). step/sweep count applied updates.
struct ReconstructionState {
    ScalarField phi;
    ScalarField a;
    int step = 0;
    int sweep = 0;
};

/// Full-model misfit after a completed sweep; sweep 0 is the initial state.
struct SweepRecord {
    int sweep = 0;
    double residual = 0.0;
};

struct LevelSetRun {
    ReconstructionState state;
    std::vector<std::pair<int, ScalarField>> snapshots;   // (step, phi) pairs
    std::vector<StepRecord> steps;
    std::vector<SweepRecord> residuals;
    double eta = 0.0;          // resolved step size actually used
};

/// One Kaczmarz shape step for channel j: forward solve at state.a, residual
/// against the measured trace, adjoint correlation, band-restricted level-set
/// update, rescale. Cells outside the band or flagged frozen keep phi bit for
/// bit (up to the global rescale factor). resid_norm, when non-null, receives
/// the channel misfit before the update.
ReconstructionState levelset_step(const Problem& prob, int j, const ReconstructionState& state,
                                  const ScalarField& a_base, const BoundaryFluxTrace& measured,
                                  double eta, const LevelSetParams& params,
                                  double* resid_norm = nullptr);

/// Level-set sweeps from phi0, each source's data used once per sweep.
LevelSetRun run_levelset(const Problem& prob, const ScalarField& a_base, const ScalarField& phi0,
                         const TraceSet& measured, const LevelSetParams& params);

struct PipelineResult {
    TbtResult tbt;
    ScalarField phi0;          // level-set initialization from the TBT image
    LevelSetRun ls;
    MaskField final_mask;
    std::vector<ShapeComponent> components;
};

/// The full two-step reconstruction: TBT sweeps, level-set initialization,
/// level-set sweeps, final shape extraction.
PipelineResult run_pipeline(const Problem& prob, const ScalarField& a_base,
                            const TraceSet& measured, const TbtParams& tbt_params,
                            const LevelSetParams& ls_params);

} // namespace dotshape
