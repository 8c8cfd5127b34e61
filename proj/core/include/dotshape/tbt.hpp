#pragma once

#include <utility>
#include <vector>

#include "dotshape/problem.hpp"

namespace dotshape {

struct TbtParams {
    int sweeps = 20;
    double a_min = 0.01;        // bounds on the total absorption a_b + a_s
    double a_max = 2.0;
    double eta = 0.0;           // fixed step size; 0 resolves it from the first update
    double eta_target = 0.05;   // largest |delta a| of the first step when auto [1/cm]
    std::vector<int> snapshot_sweeps;   // 1-based sweep counts to snapshot after
};

/// One Kaczmarz step: the residual norm seen by source `source` before its
/// update was applied. step counts globally from 1.
struct StepRecord {
    int step = 0;
    int sweep = 0;
    int source = 0;
    double resid_norm = 0.0;
};

struct TbtResult {
    ScalarField a;                                      // final total absorption
    std::vector<std::pair<int, ScalarField>> snapshots; // (sweep, a) pairs
    std::vector<StepRecord> steps;
    double eta = 0.0;            // resolved step size actually used
    double residual_start = 0.0; // full-model misfit before the first sweep
    double residual_end = 0.0;   // full-model misfit after the last sweep
};

/// Absorption update of one TBT step: a' = clamp(a + eta * corr, a_min, a_max)
/// on non-frozen cells, a' = a elsewhere. The correlation enters with a plus
/// because the misfit gradient is its negative; this is plain steepest
/// descent on 1/2 ||residual||^2.
ScalarField apply_tbt_update(const ScalarField& a, const ScalarField& corr, const MaskField& frozen,
                             double eta, double a_min, double a_max);

/// Full TBT step for channel j: forward solve at a, residual against the
/// measured trace, adjoint correlation, bounded descent update.
struct TbtStepResult {
    ScalarField a;
    double resid_norm = 0.0;
};
TbtStepResult tbt_step(const Problem& prob, int j, const ScalarField& a,
                       const BoundaryFluxTrace& measured, double eta, const TbtParams& params);

/// Kaczmarz sweeps over all channels in order, each source's data used once
/// per sweep. a_start is typically the obstacle-free background.
TbtResult run_tbt(const Problem& prob, const ScalarField& a_start, const TraceSet& measured,
                  const TbtParams& params);

} // namespace dotshape
