#pragma once

#include "dotshape/transport.hpp"

namespace dotshape {

/// Solves the time-reversed transport problem driven by boundary data zeta.
/// The result is the exact algebraic transpose of the forward scheme:
/// advection runs along -theta, the collision solve is symmetric, and zeta
/// enters as a source at its receiver pixels, spread over the outgoing
/// directions with weight nu.theta at each recorded step. The angular
/// quadrature weight is applied once, in correlate, so that measurement and
/// injection are transposes under plain sums. The dual field of substep m
/// is stored in slot m+1 (slot 0 is zero), aligning it with the forward
/// state it multiplies in correlate.
AngularFluxHistory adjoint_solve(const MediumFields& medium, const ScatteringKernel& kernel,
                                 const AngularQuadrature& quad, const TimeGrid& tg,
                                 const BoundaryFluxTrace& zeta, const BoundaryGeometry& boundary);

void adjoint_solve_into(AngularFluxHistory& out, const MediumFields& medium,
                        const ScatteringKernel& kernel, const AngularQuadrature& quad,
                        const TimeGrid& tg, const BoundaryFluxTrace& zeta,
                        const BoundaryGeometry& boundary);

/// Solves the linearization of the forward problem around base_u: the same
/// transport with the volume source -delta_a * u. Realizes R'[a] delta_a
/// when measured. base_u must be a substep-resolution history on the same
/// instance.
AngularFluxHistory linearized_forward(const MediumFields& medium, const ScatteringKernel& kernel,
                                      const AngularQuadrature& quad, const TimeGrid& tg,
                                      const AngularFluxHistory& base_u, const ScalarField& delta_a,
                                      HistoryStore store);

/// Space-angle-time correlation per cell: I(x) = sum_m sum_k u*z*w*dt_sub.
/// For every delta_a and zeta the exact-transpose identity holds:
///   sum over receivers/steps of (measured linearized_forward(delta_a)) * zeta
///     == -sum over cells of delta_a * correlate(u, adjoint_solve(zeta)).
ScalarField correlate(const AngularFluxHistory& u, const AngularFluxHistory& z,
                      const AngularQuadrature& quad);

/// Gradient of 1/2 ||residual||^2 with respect to absorption, via the
/// adjoint field of the residual. Growing absorption lowers the measured
/// flux, so the gradient is the negative of the correlation.
ScalarField misfit_gradient(const AngularFluxHistory& u, const AngularFluxHistory& z,
                            const AngularQuadrature& quad);

} // namespace dotshape
