#pragma once

#include <vector>

#include "dotshape/adjoint.hpp"

namespace dotshape {

/// One source together with the receivers and time window that see it.
struct SourceChannel {
    ResolvedSource source;
    ReceiverWindow window;
};

/// Everything that stays fixed while absorption is reconstructed: geometry,
/// quadrature, scattering physics, sources and their data windows. Only the
/// absorption field varies between forward solves.
struct Problem {
    GridSpec grid;
    AngularQuadrature quad;
    ScatteringKernel kernel;
    TimeGrid time;
    BoundaryGeometry boundary;
    std::vector<SourceChannel> channels;
    ScalarField b;        // scattering field, assumed known
    MaskField clear;      // known clear cells (a and b at the clear values)
    MaskField frozen;     // cells the inversion must not touch, a superset of clear

    Problem(const GridSpec& g, const AngularQuadrature& q, const ScatteringKernel& k,
            const TimeGrid& t, ScalarField b_, MaskField clear_, MaskField frozen_);

    /// Bundles a candidate absorption field with the fixed pieces.
    MediumFields medium_for(const ScalarField& a) const;

    void add_source(const SourceSpec& spec, double min_arc, double window_t_min);
};

using TraceSet = std::vector<BoundaryFluxTrace>;

/// Synthetic data: forward solve per channel at the true absorption,
/// measured and restricted to each channel's receivers and window.
TraceSet generate_data(const Problem& prob, const ScalarField& a_true);

/// One forward plus one adjoint pass for a single channel.
struct SourceSolve {
    BoundaryFluxTrace predicted;   // masked prediction
    BoundaryFluxTrace resid;       // predicted - measured
    double resid_norm = 0.0;       // trace_norm of resid
    ScalarField corr;              // correlate(u, adjoint(resid))
};

/// Runs channel j at absorption a against its measured trace. Workspace
/// histories, when given, are reused across calls to avoid reallocating
/// the substep storage.
SourceSolve solve_source(const Problem& prob, int j, const ScalarField& a,
                         const BoundaryFluxTrace& measured, AngularFluxHistory* u_ws = nullptr,
                         AngularFluxHistory* z_ws = nullptr);

/// Full-model misfit sqrt(sum_j ||predicted_j - measured_j||^2) at a.
double total_residual_norm(const Problem& prob, const ScalarField& a, const TraceSet& measured);

} // namespace dotshape
