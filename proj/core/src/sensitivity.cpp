#include "dotshape/sensitivity.hpp"

#include <cmath>

#include "dotshape/errors.hpp"

namespace dotshape {

namespace {

BoundaryFluxTrace impulse_trace(const BoundaryGeometry& boundary, const TimeGrid& tg,
                                int receiver, int record_step) {
    if (receiver < 0 || receiver >= boundary.count())
        throw ConfigError("sensitivity: receiver index outside the boundary walk");
    if (record_step < 1 || record_step > tg.n_rec)
        throw ConfigError("sensitivity: receiver time outside the recorded range");
    BoundaryFluxTrace zeta;
    zeta.n_boundary = boundary.count();
    zeta.n_rec = tg.n_rec;
    zeta.dt_rec = tg.dt_rec;
    zeta.v.assign((std::size_t)zeta.n_boundary * zeta.n_rec, 0.0);
    zeta.receiver_mask.assign(zeta.n_boundary, 0);
    zeta.receiver_mask[receiver] = 1;
    zeta.window_start = 1;
    zeta.at(receiver, record_step) = 1.0;
    return zeta;
}

} // namespace

ScalarField sensitivity_map_from(const AngularFluxHistory& u, const MediumFields& medium,
                                 const ScatteringKernel& kernel, const AngularQuadrature& quad,
                                 const TimeGrid& tg, const BoundaryGeometry& boundary,
                                 int receiver, int record_step) {
    const BoundaryFluxTrace zeta = impulse_trace(boundary, tg, receiver, record_step);
    const AngularFluxHistory z = adjoint_solve(medium, kernel, quad, tg, zeta, boundary);
    return misfit_gradient(u, z, quad);
}

ScalarField sensitivity_map(const MediumFields& medium, const ScatteringKernel& kernel,
                            const AngularQuadrature& quad, const TimeGrid& tg,
                            const BoundaryGeometry& boundary, const ResolvedSource& source,
                            int receiver, int record_step) {
    const AngularFluxHistory u =
        forward_solve(medium, kernel, quad, tg, source, HistoryStore::Substep);
    return sensitivity_map_from(u, medium, kernel, quad, tg, boundary, receiver, record_step);
}

double clear_layer_fraction(const ScalarField& map, const MaskField& clear) {
    if (!map.same_shape(clear)) throw ConfigError("clear_layer_fraction: shape mismatch");
    double inside = 0.0;
    double total = 0.0;
    for (int c = 0; c < map.nx() * map.ny(); ++c) {
        const double m = std::abs(map[c]);
        total += m;
        if (clear[c]) inside += m;
    }
    if (total == 0.0) throw NumericError("clear_layer_fraction: map is identically zero");
    return inside / total;
}

int find_boundary_pixel(const BoundaryGeometry& boundary, Side side, int along) {
    for (int i = 0; i < boundary.count(); ++i) {
        const BoundaryPixel& p = boundary.pixels[i];
        if (p.side != side) continue;
        const int a = (side == Side::Left || side == Side::Right) ? p.iy : p.ix;
        if (a == along) return i;
    }
    throw ConfigError("sensitivity: no boundary pixel matches the requested side/coordinate");
}

} // namespace dotshape
