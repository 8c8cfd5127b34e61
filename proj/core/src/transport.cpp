#include "dotshape/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "dotshape/errors.hpp"
#include "dotshape/threading.hpp"
#include "stepper.hpp"

namespace dotshape {

namespace detail {

void advect_plane(const double* in, double* out, int nx, int ny, double tx, double ty,
                  double cfl, double* outflow) {
    const double nux = std::abs(tx) * cfl;
    const double nuy = std::abs(ty) * cfl;
    const int sx = tx > 0.0 ? 1 : (tx < 0.0 ? -1 : 0);
    const int sy = ty > 0.0 ? 1 : (ty < 0.0 ? -1 : 0);
    const double stay = 1.0 - nux - nuy;

    for (int iy = 0; iy < ny; ++iy) {
        const double* rin = in + static_cast<std::size_t>(iy) * nx;
        double* ro = out + static_cast<std::size_t>(iy) * nx;
        const int iyu = iy - sy;
        const double* rup =
            (sy != 0 && iyu >= 0 && iyu < ny) ? in + static_cast<std::size_t>(iyu) * nx : nullptr;
        if (rup) {
            for (int ix = 0; ix < nx; ++ix)
                ro[ix] = stay * rin[ix] + nuy * rup[ix];
        } else {
            for (int ix = 0; ix < nx; ++ix)
                ro[ix] = stay * rin[ix];
        }
        if (sx == 1) {
            for (int ix = 1; ix < nx; ++ix)
                ro[ix] += nux * rin[ix - 1];
        } else if (sx == -1) {
            for (int ix = 0; ix < nx - 1; ++ix)
                ro[ix] += nux * rin[ix + 1];
        }
    }

    if (outflow) {
        double of = 0.0;
        if (sx == 1) {
            for (int iy = 0; iy < ny; ++iy)
                of += nux * in[static_cast<std::size_t>(iy) * nx + nx - 1];
        } else if (sx == -1) {
            for (int iy = 0; iy < ny; ++iy)
                of += nux * in[static_cast<std::size_t>(iy) * nx];
        }
        if (sy == 1) {
            const double* row = in + static_cast<std::size_t>(ny - 1) * nx;
            for (int ix = 0; ix < nx; ++ix)
                of += nuy * row[ix];
        } else if (sy == -1) {
            for (int ix = 0; ix < nx; ++ix)
                of += nuy * in[ix];
        }
        *outflow += of;
    }
}

CollisionTransform build_collision_transform(const AngularQuadrature& quad,
                                             const ScatteringKernel& kernel) {
    const int n = quad.n_dirs;
    CollisionTransform t;
    t.n_dirs = n;
    t.basis.assign(static_cast<std::size_t>(n) * n, 0.0);
    t.kappa.assign(n, 0.0);

    // Row 0 of w*K generates the circulant.
    std::vector<double> wk(n);
    for (int d = 0; d < n; ++d)
        wk[d] = quad.weight * kernel.at(0, d);

    auto col = [&](int m) { return t.basis.data() + static_cast<std::size_t>(m) * n; };
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double amp = std::sqrt(2.0 / n);

    for (int j = 0; j < n; ++j)
        col(0)[j] = inv_sqrt_n;
    t.kappa[0] = 1.0;   // particle-count mode of the normalized kernel

    for (int m = 1; m < n / 2; ++m) {
        double kap = 0.0;
        for (int d = 0; d < n; ++d)
            kap += wk[d] * std::cos(2.0 * std::numbers::pi * m * d / n);
        double* qc = col(2 * m - 1);
        double* qs = col(2 * m);
        for (int j = 0; j < n; ++j) {
            const double ang = 2.0 * std::numbers::pi * m * j / n;
            qc[j] = amp * std::cos(ang);
            qs[j] = amp * std::sin(ang);
        }
        t.kappa[2 * m - 1] = kap;
        t.kappa[2 * m] = kap;
    }

    double kap_alt = 0.0;
    for (int d = 0; d < n; ++d)
        kap_alt += (d % 2 == 0 ? wk[d] : -wk[d]);
    double* qa = col(n - 1);
    for (int j = 0; j < n; ++j)
        qa[j] = (j % 2 == 0 ? inv_sqrt_n : -inv_sqrt_n);
    t.kappa[n - 1] = kap_alt;

    return t;
}

} // namespace detail

using internal::Stepper;
using internal::check_finite;
using internal::validate_inputs;

void AngularFluxHistory::reset(const GridSpec& g, int n_dirs_, const TimeGrid& tg_,
                               HistoryStore store_) {
    grid = g;
    n_dirs = n_dirs_;
    tg = tg_;
    store = store_;
    n_states = (store_ == HistoryStore::Recorded ? tg_.n_rec : tg_.total_substeps()) + 1;
    v.resize(stride() * n_states);
}

ResolvedSource resolve_source(const GridSpec& grid, const BoundaryGeometry& boundary,
                              const AngularQuadrature& quad, const TimeGrid& tg,
                              const SourceSpec& spec) {
    if (spec.width_px < 1)
        throw ConfigError("source: width must be at least one pixel");
    if (!(spec.amplitude >= 0.0))
        throw ConfigError("source: amplitude must be nonnegative");
    if (boundary.index_of.nx() != grid.nx || boundary.index_of.ny() != grid.ny)
        throw ConfigError("source: boundary does not match the grid");
    const int along = (spec.side == Side::Left || spec.side == Side::Right) ? grid.ny : grid.nx;
    if (spec.first_px < 0 || spec.first_px + spec.width_px > along)
        throw ConfigError("source: span leaves the side");

    ResolvedSource rs;
    rs.spec = spec;
    rs.cells.reserve(spec.width_px);
    std::vector<int> bidx(spec.width_px);
    for (int t = 0; t < spec.width_px; ++t) {
        int ix = 0, iy = 0;
        const int p = spec.first_px + t;
        switch (spec.side) {
        case Side::Left:   ix = 0;           iy = p; break;
        case Side::Right:  ix = grid.nx - 1; iy = p; break;
        case Side::Bottom: ix = p;           iy = 0; break;
        case Side::Top:    ix = p;           iy = grid.ny - 1; break;
        }
        rs.cells.push_back(static_cast<int>(boundary.index_of.idx(ix, iy)));
        bidx[t] = boundary.index_of(ix, iy);
    }

    const auto nrm = side_normal(spec.side);
    double best = -2.0;
    for (int k = 0; k < quad.n_dirs; ++k) {
        const double dot = -(nrm[0] * quad.tx(k) + nrm[1] * quad.ty(k));
        if (dot > best) {
            best = dot;
            rs.dir = k;
        }
    }
    if (best < 1.0 - 1e-9)
        throw ConfigError("source: no quadrature direction matches the inward normal "
                          "(axis normals need n_dirs divisible by 4)");

    rs.arc_center = boundary.pixels[bidx[(spec.width_px - 1) / 2]].arc;
    rs.rate = spec.amplitude /
              (tg.dt_rec * spec.width_px * quad.weight * grid.cell_area());
    return rs;
}

void forward_solve_into(AngularFluxHistory& out, const MediumFields& medium,
                        const ScatteringKernel& kernel, const AngularQuadrature& quad,
                        const TimeGrid& tg, const ResolvedSource& source, HistoryStore store,
                        SolveStats* stats) {
    validate_inputs(medium, kernel, quad);
    if (source.dir < 0 || source.dir >= quad.n_dirs)
        throw ConfigError("transport: source direction out of range");

    Stepper st(medium, kernel, quad, tg);
    st.check_cfl();

    out.reset(medium.grid, quad.n_dirs, tg, store);
    const std::size_t len = out.stride();
    std::vector<double> cur(len, 0.0), nxt(len);
    std::memset(out.state(0), 0, len * sizeof(double));

    const int S = tg.substeps;
    const int M = tg.total_substeps();
    const double w = quad.weight;
    const double da = medium.grid.cell_area();
    const std::size_t plane = out.plane();

    std::vector<double> ofk(quad.n_dirs, 0.0);
    double injected = 0.0;
    if (stats) {
        stats->injected.assign(tg.n_rec + 1, 0.0);
        stats->outflow.assign(tg.n_rec + 1, 0.0);
    }

    for (int m = 0; m < M; ++m) {
        st.advect(cur.data(), nxt.data(), false, stats ? &ofk : nullptr);
        if (m < S && source.rate > 0.0) {
            const double add = tg.dt_sub() * source.rate;
            double* pl = nxt.data() + static_cast<std::size_t>(source.dir) * plane;
            for (int c : source.cells)
                pl[c] += add;
            injected += add * w * da * static_cast<double>(source.cells.size());
        }
        st.collide(nxt.data());
        cur.swap(nxt);

        if (store == HistoryStore::Substep) {
            std::memcpy(out.state(m + 1), cur.data(), len * sizeof(double));
        }
        if ((m + 1) % S == 0) {
            const int i = (m + 1) / S;
            if (store == HistoryStore::Recorded)
                std::memcpy(out.state(i), cur.data(), len * sizeof(double));
            check_finite(cur.data(), len);
            if (stats) {
                double of = 0.0;
                for (int k = 0; k < quad.n_dirs; ++k)
                    of += ofk[k];
                stats->outflow[i] = of * w * da;
                stats->injected[i] = injected;
            }
        }
    }
}

AngularFluxHistory forward_solve(const MediumFields& medium, const ScatteringKernel& kernel,
                                 const AngularQuadrature& quad, const TimeGrid& tg,
                                 const ResolvedSource& source, HistoryStore store,
                                 SolveStats* stats) {
    AngularFluxHistory out;
    forward_solve_into(out, medium, kernel, quad, tg, source, store, stats);
    return out;
}

BoundaryFluxTrace measure(const AngularFluxHistory& hist, const BoundaryGeometry& boundary,
                          const AngularQuadrature& quad) {
    if (boundary.index_of.nx() != hist.grid.nx || boundary.index_of.ny() != hist.grid.ny)
        throw ConfigError("measure: boundary does not match the history grid");
    if (hist.n_dirs != quad.n_dirs)
        throw ConfigError("measure: quadrature size mismatch");

    BoundaryFluxTrace tr;
    tr.n_boundary = boundary.count();
    tr.n_rec = hist.tg.n_rec;
    tr.dt_rec = hist.tg.dt_rec;
    tr.v.assign(static_cast<std::size_t>(tr.n_boundary) * tr.n_rec, 0.0);
    tr.receiver_mask.assign(tr.n_boundary, 1);
    tr.window_start = 1;

    // Outgoing directions and their nu.theta * w coefficients per side.
    std::array<std::vector<std::pair<int, double>>, 4> outgoing;
    for (int s = 0; s < 4; ++s) {
        const auto nrm = side_normal(static_cast<Side>(s));
        for (int k = 0; k < quad.n_dirs; ++k) {
            const double nd = nrm[0] * quad.tx(k) + nrm[1] * quad.ty(k);
            if (nd > 0.0)
                outgoing[s].emplace_back(k, nd * quad.weight);
        }
    }

    const std::size_t plane = hist.plane();
    for (int i = 1; i <= tr.n_rec; ++i) {
        const double* u = hist.state(hist.recorded_state(i));
        for (int r = 0; r < tr.n_boundary; ++r) {
            const BoundaryPixel& p = boundary.pixels[r];
            const std::size_t cell = hist.grid.nx * static_cast<std::size_t>(p.iy) + p.ix;
            double g = 0.0;
            for (const auto& [k, coeff] : outgoing[static_cast<int>(p.side)])
                g += coeff * u[static_cast<std::size_t>(k) * plane + cell];
            tr.at(r, i) = g;
        }
    }
    return tr;
}

ReceiverWindow select_receivers(const BoundaryGeometry& boundary, const ResolvedSource& source,
                                double min_arc, const TimeGrid& tg, double window_t_min) {
    ReceiverWindow rw;
    rw.receiver_mask.assign(boundary.count(), 0);
    int found = 0;

    // Arc distances are measured from the span center along the perimeter.
    for (int r = 0; r < boundary.count(); ++r) {
        const double d = std::abs(boundary.pixels[r].arc - source.arc_center);
        const double arc = std::min(d, boundary.perimeter - d);
        if (arc >= min_arc) {
            rw.receiver_mask[r] = 1;
            ++found;
        }
    }
    if (found == 0)
        throw ConfigError("receivers: no boundary pixel is far enough from the source");

    const double tol = 1e-9 * std::max(1.0, std::abs(window_t_min));
    rw.window_start = static_cast<int>(std::floor((window_t_min + tol) / tg.dt_rec)) + 1;
    if (rw.window_start < 1)
        rw.window_start = 1;
    if (rw.window_start > tg.n_rec)
        throw ConfigError("receivers: time window excludes every recorded step");
    return rw;
}

BoundaryFluxTrace apply_mask(const BoundaryFluxTrace& trace, const ReceiverWindow& rw) {
    if (static_cast<int>(rw.receiver_mask.size()) != trace.n_boundary)
        throw ConfigError("apply_mask: receiver mask size mismatch");
    BoundaryFluxTrace out = trace;
    out.receiver_mask = rw.receiver_mask;
    out.window_start = rw.window_start;
    for (int r = 0; r < out.n_boundary; ++r)
        for (int i = 1; i <= out.n_rec; ++i)
            if (!out.receiver_mask[r] || i < out.window_start)
                out.at(r, i) = 0.0;
    return out;
}

BoundaryFluxTrace residual(const BoundaryFluxTrace& computed, const BoundaryFluxTrace& observed) {
    if (!computed.same_layout(observed))
        throw ConfigError("residual: traces have different receiver sets or windows");
    BoundaryFluxTrace out = computed;
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] -= observed.v[i];
    return out;
}

double trace_norm(const BoundaryFluxTrace& trace) {
    double s = 0.0;
    for (double x : trace.v)
        s += x * x;
    return std::sqrt(s * trace.dt_rec);
}

double state_mass(const AngularFluxHistory& hist, int s, const AngularQuadrature& quad) {
    const double* p = hist.state(s);
    double m = 0.0;
    for (std::size_t i = 0; i < hist.stride(); ++i)
        m += p[i];
    return m * quad.weight * hist.grid.cell_area();
}

} // namespace dotshape
