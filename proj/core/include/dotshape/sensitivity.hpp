#pragma once

#include "dotshape/adjoint.hpp"

namespace dotshape {

/// Sensitivity of one source-receiver-time datum to local absorption
/// changes: pairing the map with delta_a gives the linearized change of the
/// measurement at (receiver, record_step). Extra absorption lowers the
/// reading, so the map is nonpositive wherever the forward and adjoint
/// fields overlap.
ScalarField sensitivity_map(const MediumFields& medium, const ScatteringKernel& kernel,
                            const AngularQuadrature& quad, const TimeGrid& tg,
                            const BoundaryGeometry& boundary, const ResolvedSource& source,
                            int receiver, int record_step);

/// Same, reusing a forward history (substep resolution) so several
/// (receiver, time) maps share one forward solve.
ScalarField sensitivity_map_from(const AngularFluxHistory& u, const MediumFields& medium,
                                 const ScatteringKernel& kernel, const AngularQuadrature& quad,
                                 const TimeGrid& tg, const BoundaryGeometry& boundary,
                                 int receiver, int record_step);

/// Share of the map's mass inside the clear cells:
/// sum |map| over clear / sum |map| over all. All-zero maps are rejected.
double clear_layer_fraction(const ScalarField& map, const MaskField& clear);

/// Boundary pixel index for a side plus along-side pixel coordinate
/// (y for left/right sides, x for bottom/top).
int find_boundary_pixel(const BoundaryGeometry& boundary, Side side, int along);

} // namespace dotshape
