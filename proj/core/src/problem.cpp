#include "dotshape/problem.hpp"

#include <cmath>
#include <utility>

#include "dotshape/errors.hpp"

namespace dotshape {

Problem::Problem(const GridSpec& g, const AngularQuadrature& q, const ScatteringKernel& k,
                 const TimeGrid& t, ScalarField b_, MaskField clear_, MaskField frozen_)
    : grid(g),
      quad(q),
      kernel(k),
      time(t),
      boundary(build_boundary(g)),
      b(std::move(b_)),
      clear(std::move(clear_)),
      frozen(std::move(frozen_)) {
    if (kernel.n_dirs != quad.n_dirs) throw ConfigError("problem: kernel/quadrature size mismatch");
    if (b.nx() != grid.nx || b.ny() != grid.ny || !b.same_shape(clear) || !b.same_shape(frozen))
        throw ConfigError("problem: field shapes do not match the grid");
    for (int c = 0; c < grid.nx * grid.ny; ++c)
        if (clear[c] && !frozen[c]) throw ConfigError("problem: clear cell outside the frozen set");
}

MediumFields Problem::medium_for(const ScalarField& a) const {
    MediumFields m;
    m.grid = grid;
    m.a = a;
    m.b = b;
    m.clear_mask = clear;
    m.frozen_mask = frozen;
    m.validate();
    return m;
}

void Problem::add_source(const SourceSpec& spec, double min_arc, double window_t_min) {
    SourceChannel ch{resolve_source(grid, boundary, quad, time, spec), ReceiverWindow{}};
    ch.window = select_receivers(boundary, ch.source, min_arc, time, window_t_min);
    channels.push_back(std::move(ch));
}

TraceSet generate_data(const Problem& prob, const ScalarField& a_true) {
    const MediumFields medium = prob.medium_for(a_true);
    TraceSet data;
    data.reserve(prob.channels.size());
    AngularFluxHistory u;
    for (const SourceChannel& ch : prob.channels) {
        forward_solve_into(u, medium, prob.kernel, prob.quad, prob.time, ch.source,
                           HistoryStore::Recorded);
        data.push_back(apply_mask(measure(u, prob.boundary, prob.quad), ch.window));
    }
    return data;
}

SourceSolve solve_source(const Problem& prob, int j, const ScalarField& a,
                         const BoundaryFluxTrace& measured, AngularFluxHistory* u_ws,
                         AngularFluxHistory* z_ws) {
    if (j < 0 || j >= (int)prob.channels.size()) throw ConfigError("solve_source: bad channel index");
    const SourceChannel& ch = prob.channels[j];
    const MediumFields medium = prob.medium_for(a);

    AngularFluxHistory u_local, z_local;
    AngularFluxHistory& u = u_ws ? *u_ws : u_local;
    AngularFluxHistory& z = z_ws ? *z_ws : z_local;

    forward_solve_into(u, medium, prob.kernel, prob.quad, prob.time, ch.source,
                       HistoryStore::Substep);

    SourceSolve out;
    out.predicted = apply_mask(measure(u, prob.boundary, prob.quad), ch.window);
    out.resid = residual(out.predicted, measured);
    out.resid_norm = trace_norm(out.resid);

    adjoint_solve_into(z, medium, prob.kernel, prob.quad, prob.time, out.resid, prob.boundary);
    out.corr = correlate(u, z, prob.quad);
    return out;
}

double total_residual_norm(const Problem& prob, const ScalarField& a, const TraceSet& measured) {
    if (measured.size() != prob.channels.size())
        throw ConfigError("total_residual_norm: one trace per channel required");
    const MediumFields medium = prob.medium_for(a);
    AngularFluxHistory u;
    double sq = 0.0;
    for (std::size_t j = 0; j < prob.channels.size(); ++j) {
        forward_solve_into(u, medium, prob.kernel, prob.quad, prob.time, prob.channels[j].source,
                           HistoryStore::Recorded);
        const BoundaryFluxTrace pred =
            apply_mask(measure(u, prob.boundary, prob.quad), prob.channels[j].window);
        const double nrm = trace_norm(residual(pred, measured[j]));
        sq += nrm * nrm;
    }
    return std::sqrt(sq);
}

} // namespace dotshape
