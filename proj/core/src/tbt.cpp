#include "dotshape/tbt.hpp"

#include <algorithm>
#include <cmath>

#include "dotshape/errors.hpp"

namespace dotshape {

namespace {

void check_params(const TbtParams& p) {
    if (p.sweeps < 0) throw ConfigError("tbt: sweeps must be >= 0");
    if (!(p.a_min > 0.0) || !(p.a_max > p.a_min)) throw ConfigError("tbt: need 0 < a_min < a_max");
    if (p.eta < 0.0 || p.eta_target <= 0.0) throw ConfigError("tbt: step sizes must be positive");
}

/// Largest |corr| over updatable cells; the auto step size normalizes this.
double max_update(const ScalarField& corr, const MaskField& frozen) {
    double m = 0.0;
    for (int c = 0; c < corr.nx() * corr.ny(); ++c)
        if (!frozen[c]) m = std::max(m, std::abs(corr[c]));
    return m;
}

} // namespace

ScalarField apply_tbt_update(const ScalarField& a, const ScalarField& corr, const MaskField& frozen,
                             double eta, double a_min, double a_max) {
    if (!a.same_shape(corr) || !a.same_shape(frozen))
        throw ConfigError("tbt update: shape mismatch");
    ScalarField out = a;
    for (int c = 0; c < a.nx() * a.ny(); ++c) {
        if (frozen[c]) continue;
        out[c] = std::clamp(a[c] + eta * corr[c], a_min, a_max);
    }
    return out;
}

TbtStepResult tbt_step(const Problem& prob, int j, const ScalarField& a,
                       const BoundaryFluxTrace& measured, double eta, const TbtParams& params) {
    check_params(params);
    const SourceSolve s = solve_source(prob, j, a, measured);
    return {apply_tbt_update(a, s.corr, prob.frozen, eta, params.a_min, params.a_max),
            s.resid_norm};
}

TbtResult run_tbt(const Problem& prob, const ScalarField& a_start, const TraceSet& measured,
                  const TbtParams& params) {
    check_params(params);
    if (measured.size() != prob.channels.size())
        throw ConfigError("run_tbt: one measured trace per channel required");

    TbtResult res;
    res.a = a_start;
    res.eta = params.eta;
    res.residual_start = total_residual_norm(prob, res.a, measured);

    AngularFluxHistory u_ws, z_ws;
    int step = 0;
    for (int sweep = 1; sweep <= params.sweeps; ++sweep) {
        for (int j = 0; j < (int)prob.channels.size(); ++j) {
            const SourceSolve s = solve_source(prob, j, res.a, measured[j], &u_ws, &z_ws);
            if (res.eta == 0.0) {
                // First update fixes the step size: its largest change
                // becomes eta_target. A zero correlation (data already
                // matched) leaves eta unresolved and the sweep a no-op.
                const double m = max_update(s.corr, prob.frozen);
                if (m > 0.0) res.eta = params.eta_target / m;
            }
            res.a = apply_tbt_update(res.a, s.corr, prob.frozen, res.eta, params.a_min,
                                     params.a_max);
            res.steps.push_back({++step, sweep, j, s.resid_norm});
        }
        if (std::find(params.snapshot_sweeps.begin(), params.snapshot_sweeps.end(), sweep) !=
            params.snapshot_sweeps.end())
            res.snapshots.emplace_back(sweep, res.a);
    }

    res.residual_end = params.sweeps == 0 ? res.residual_start
                                          : total_residual_norm(prob, res.a, measured);
    return res;
}

} // namespace dotshape
