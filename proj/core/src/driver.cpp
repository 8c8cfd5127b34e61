#include "dotshape/driver.hpp"

#include <algorithm>
#include <cmath>

#include "dotshape/errors.hpp"

namespace dotshape {

namespace {

void check_params(const LevelSetParams& p) {
    if (p.sweeps < 0) throw ConfigError("levelset: sweeps must be >= 0");
    if (p.eta < 0.0 || p.eta_target <= 0.0 || p.max_step < 0.0)
        throw ConfigError("levelset: step sizes must be positive");
    if (p.plateau_tol <= 0.0) throw ConfigError("levelset: plateau tolerance must be positive");
}

MaskField updatable_cells(const MaskField& frozen) {
    MaskField m(frozen.nx(), frozen.ny(), 0);
    for (int c = 0; c < frozen.nx() * frozen.ny(); ++c) m[c] = frozen[c] ? 0 : 1;
    return m;
}

ScalarField absorption_of(const ScalarField& phi, const ScalarField& a_base, double a_hat) {
    ScalarField a = a_base;
    for (int c = 0; c < a.nx() * a.ny(); ++c)
        if (phi[c] <= 0.0) a[c] = a_hat;
    return a;
}

ReconstructionState apply_shape_update(const ReconstructionState& state, const ScalarField& corr,
                                       const ScalarField& a_base, const MaskField& update_mask,
                                       double eta, const LevelSetParams& params) {
    const BandMask band = extract_band(state.phi, params.shape.rho);
    ScalarField phi = levelset_update(state.phi, corr, band, eta, params.shape.a_hat, a_base,
                                      &update_mask, params.max_step);
    phi = rescale(phi, params.shape.rescale_target);
    ReconstructionState next;
    next.phi = std::move(phi);
    next.a = absorption_of(next.phi, a_base, params.shape.a_hat);
    next.step = state.step + 1;
    next.sweep = state.sweep;
    return next;
}

} // namespace

ReconstructionState levelset_step(const Problem& prob, int j, const ReconstructionState& state,
                                  const ScalarField& a_base, const BoundaryFluxTrace& measured,
                                  double eta, const LevelSetParams& params, double* resid_norm) {
    check_params(params);
    const SourceSolve s = solve_source(prob, j, state.a, measured);
    if (resid_norm) *resid_norm = s.resid_norm;
    const MaskField update_mask = updatable_cells(prob.frozen);
    return apply_shape_update(state, s.corr, a_base, update_mask, eta, params);
}

LevelSetRun run_levelset(const Problem& prob, const ScalarField& a_base, const ScalarField& phi0,
                         const TraceSet& measured, const LevelSetParams& params) {
    check_params(params);
    if (measured.size() != prob.channels.size())
        throw ConfigError("run_levelset: one measured trace per channel required");

    const MaskField update_mask = updatable_cells(prob.frozen);

    LevelSetRun run;
    run.eta = params.eta;
    run.state.phi = phi0;
    run.state.a = absorption_of(phi0, a_base, params.shape.a_hat);
    run.residuals.push_back({0, total_residual_norm(prob, run.state.a, measured)});

    AngularFluxHistory u_ws, z_ws;
    int step = 0;
    for (int sweep = 1; sweep <= params.sweeps; ++sweep) {
        run.state.sweep = sweep;
        for (int j = 0; j < (int)prob.channels.size(); ++j) {
            const SourceSolve s = solve_source(prob, j, run.state.a, measured[j], &u_ws, &z_ws);
            if (run.eta == 0.0) {
                const BandMask band = extract_band(run.state.phi, params.shape.rho);
                const double m =
                    max_band_update(s.corr, band, params.shape.a_hat, a_base, &update_mask);
                if (m > 0.0) run.eta = params.eta_target / m;
            }
            run.state = apply_shape_update(run.state, s.corr, a_base, update_mask, run.eta, params);
            run.steps.push_back({++step, sweep, j, s.resid_norm});
            if (std::find(params.snapshot_steps.begin(), params.snapshot_steps.end(), step) !=
                params.snapshot_steps.end())
                run.snapshots.emplace_back(step, run.state.phi);
        }
        const double resid = total_residual_norm(prob, run.state.a, measured);
        run.residuals.push_back({sweep, resid});
        if (params.stop_on_plateau && run.residuals.size() >= 2) {
            const double prev = run.residuals[run.residuals.size() - 2].residual;
            if (std::abs(prev - resid) <= params.plateau_tol * std::max(prev, 1e-300)) break;
        }
    }
    return run;
}

PipelineResult run_pipeline(const Problem& prob, const ScalarField& a_base,
                            const TraceSet& measured, const TbtParams& tbt_params,
                            const LevelSetParams& ls_params) {
    PipelineResult res;
    res.tbt = run_tbt(prob, a_base, measured, tbt_params);

    const MaskField update_mask = updatable_cells(prob.frozen);
    res.phi0 = init_from_tbt(res.tbt.a, ls_params.shape.a_hat, a_base, ls_params.shape.gamma_ls,
                             ls_params.shape.rescale_target, &update_mask);

    res.ls = run_levelset(prob, a_base, res.phi0, measured, ls_params);
    res.final_mask = heaviside_map(res.ls.state.phi);
    res.components = connected_components(res.final_mask);
    return res;
}

} // namespace dotshape
