#pragma once

#include <cstdint>
#include <vector>

#include "dotshape/field.hpp"
#include "dotshape/grid.hpp"
#include "dotshape/kernel.hpp"
#include "dotshape/medium.hpp"

namespace dotshape {

/// Boundary pulse: a span of pixels on one side, radiating along the inward
/// normal during the first recorded step. amplitude is the total injected
/// mass in the sum(u * w * dA) sense.
struct SourceSpec {
    Side side = Side::Left;
    int first_px = 0;    // along-side pixel index (y for left/right, x for bottom/top)
    int width_px = 1;
    double amplitude = 1.0;
};

struct ResolvedSource {
    SourceSpec spec;
    std::vector<int> cells;   // flat cell indices
    int dir = -1;             // direction slot matching the inward normal
    double rate = 0.0;        // per-cell injection density per unit time
    double arc_center = 0.0;  // arc coordinate of the span center
};

/// Fails when the span leaves the side or no quadrature direction matches
/// the inward normal (axis normals need n_dirs divisible by 4).
ResolvedSource resolve_source(const GridSpec& grid, const BoundaryGeometry& boundary,
                              const AngularQuadrature& quad, const TimeGrid& tg,
                              const SourceSpec& spec);

enum class HistoryStore { Recorded, Substep };

/// Time history of the angular flux. States are post-collision snapshots;
/// index 0 is the zero initial state. Recorded mode keeps every
/// tg.substeps-th state, Substep mode keeps all of them.
struct AngularFluxHistory {
    GridSpec grid;
    int n_dirs = 0;
    TimeGrid tg;
    HistoryStore store = HistoryStore::Substep;
    int n_states = 0;
    std::vector<double> v;   // state, then direction plane, then row-major cells

    std::size_t plane() const { return static_cast<std::size_t>(grid.nx) * grid.ny; }
    std::size_t stride() const { return plane() * n_dirs; }
    double* state(int s) { return v.data() + stride() * s; }
    const double* state(int s) const { return v.data() + stride() * s; }
    /// State holding recorded step i (i in [0, n_rec]).
    int recorded_state(int i) const {
        return store == HistoryStore::Recorded ? i : i * tg.substeps;
    }

    void reset(const GridSpec& g, int n_dirs_, const TimeGrid& tg_, HistoryStore store_);
};

/// Mass bookkeeping of one forward run, cumulative per recorded step
/// (index 0 is the initial state). All entries use sum(u * w * dA) units.
struct SolveStats {
    std::vector<double> injected;
    std::vector<double> outflow;
};

/// Boundary flux trace at recorded steps 1..n_rec over the full perimeter.
/// receiver_mask / window_start describe the restriction the values satisfy
/// (unrestricted traces keep every pixel and window_start == 1).
struct BoundaryFluxTrace {
    int n_boundary = 0;
    int n_rec = 0;
    double dt_rec = 0.0;
    std::vector<double> v;                   // [receiver][recorded step - 1]
    std::vector<std::uint8_t> receiver_mask;
    int window_start = 1;

    double& at(int r, int i) { return v[static_cast<std::size_t>(r) * n_rec + (i - 1)]; }
    double at(int r, int i) const { return v[static_cast<std::size_t>(r) * n_rec + (i - 1)]; }
    bool same_layout(const BoundaryFluxTrace& o) const {
        return n_boundary == o.n_boundary && n_rec == o.n_rec && dt_rec == o.dt_rec &&
               receiver_mask == o.receiver_mask && window_start == o.window_start;
    }
};

/// Receiver subset plus recorded-step window for one source.
struct ReceiverWindow {
    std::vector<std::uint8_t> receiver_mask;
    int window_start = 1;
};

/// Solves the forward transport problem. Throws NumericError when the
/// substep violates the donor-cell CFL bound for this direction set or when
/// the state stops being finite.
AngularFluxHistory forward_solve(const MediumFields& medium, const ScatteringKernel& kernel,
                                 const AngularQuadrature& quad, const TimeGrid& tg,
                                 const ResolvedSource& source, HistoryStore store,
                                 SolveStats* stats = nullptr);

/// Same, reusing the history's storage when shapes allow.
void forward_solve_into(AngularFluxHistory& out, const MediumFields& medium,
                        const ScatteringKernel& kernel, const AngularQuadrature& quad,
                        const TimeGrid& tg, const ResolvedSource& source, HistoryStore store,
                        SolveStats* stats = nullptr);

/// Outgoing flux density G(r, t) = sum_{nu.theta_k > 0} nu.theta_k * u * w
/// sampled at recorded steps.
BoundaryFluxTrace measure(const AngularFluxHistory& hist, const BoundaryGeometry& boundary,
                          const AngularQuadrature& quad);

/// Receivers at arc distance >= min_arc from the source center; recorded
/// steps with t > window_t_min. Empty selections are rejected.
ReceiverWindow select_receivers(const BoundaryGeometry& boundary, const ResolvedSource& source,
                                double min_arc, const TimeGrid& tg, double window_t_min);

/// Copy restricted to a receiver window: values outside it become zero.
BoundaryFluxTrace apply_mask(const BoundaryFluxTrace& trace, const ReceiverWindow& rw);

/// Pointwise computed-minus-observed on identical layouts.
BoundaryFluxTrace residual(const BoundaryFluxTrace& computed, const BoundaryFluxTrace& observed);

/// sqrt(sum of squares * dt_rec) over the trace.
double trace_norm(const BoundaryFluxTrace& trace);

/// Interior mass sum(u * w * dA) of one stored state.
double state_mass(const AngularFluxHistory& hist, int s, const AngularQuadrature& quad);

namespace detail {

/// One donor-cell substep of a single direction plane with vacuum inflow.
/// cfl is c * dt / dx; the direction components pick the upwind side. When
/// outflow is non-null the plain-unit boundary loss (sum of cell values
/// leaving) is accumulated into it.
void advect_plane(const double* in, double* out, int nx, int ny, double tx, double ty,
                  double cfl, double* outflow);

/// Orthonormal real Fourier basis shared by every circulant collision
/// matrix on n equispaced directions, with the spectrum of w * K.
/// The conserved constant mode carries kappa = 1 exactly.
struct CollisionTransform {
    int n_dirs = 0;
    std::vector<double> basis;   // column-major n x n, columns are modes
    std::vector<double> kappa;   // eigenvalue of w*K per mode
};

CollisionTransform build_collision_transform(const AngularQuadrature& quad,
                                             const ScatteringKernel& kernel);

} // namespace detail

} // namespace dotshape
