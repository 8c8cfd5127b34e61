#include "dotshape/adjoint.hpp"

#include <cstring>

#include "dotshape/errors.hpp"
#include "dotshape/threading.hpp"
#include "stepper.hpp"

namespace dotshape {

using internal::Stepper;
using internal::check_finite;
using internal::validate_inputs;

void adjoint_solve_into(AngularFluxHistory& out, const MediumFields& medium,
                        const ScatteringKernel& kernel, const AngularQuadrature& quad,
                        const TimeGrid& tg, const BoundaryFluxTrace& zeta,
                        const BoundaryGeometry& boundary) {
    validate_inputs(medium, kernel, quad);
    if (boundary.index_of.nx() != medium.grid.nx || boundary.index_of.ny() != medium.grid.ny)
        throw ConfigError("adjoint: boundary does not match the grid");
    if (zeta.n_boundary != boundary.count() || zeta.n_rec != tg.n_rec)
        throw ConfigError("adjoint: trace shape does not match the instance");

    Stepper st(medium, kernel, quad, tg);
    st.check_cfl();

    out.reset(medium.grid, quad.n_dirs, tg, HistoryStore::Substep);
    const std::size_t len = out.stride();
    const std::size_t plane = out.plane();
    std::vector<double> cur(len, 0.0), nxt(len);

    const int S = tg.substeps;
    const int M = tg.total_substeps();
    std::memset(out.state(0), 0, len * sizeof(double));

    // Injection stencil: for each masked receiver, the outgoing directions
    // with their nu.theta weights (the transpose of the measurement sum,
    // whose w factor lives in correlate).
    struct Inject {
        std::size_t cell;
        int r;
        int k;
        double coeff;
    };
    std::vector<Inject> stencil;
    for (int r = 0; r < boundary.count(); ++r) {
        if (!zeta.receiver_mask[r])
            continue;
        const BoundaryPixel& p = boundary.pixels[r];
        const auto nrm = side_normal(p.side);
        const std::size_t cell = medium.grid.nx * static_cast<std::size_t>(p.iy) + p.ix;
        for (int k = 0; k < quad.n_dirs; ++k) {
            const double nd = nrm[0] * quad.tx(k) + nrm[1] * quad.ty(k);
            if (nd > 0.0)
                stencil.push_back({cell, r, k, nd});
        }
    }

    for (int m = M - 1; m >= 0; --m) {
        st.advect(cur.data(), nxt.data(), true, nullptr);
        if ((m + 1) % S == 0) {
            const int i = (m + 1) / S;
            if (i >= zeta.window_start) {
                for (const Inject& in : stencil)
                    nxt[static_cast<std::size_t>(in.k) * plane + in.cell] +=
                        in.coeff * zeta.at(in.r, i);
            }
        }
        st.collide(nxt.data());
        cur.swap(nxt);
        // the dual field of substep m multiplies the forward state m+1, so
        // it lands in slot m+1 and correlate can pair slots synchronously
        std::memcpy(out.state(m + 1), cur.data(), len * sizeof(double));
        if (m % S == 0)
            check_finite(cur.data(), len);
    }
}

AngularFluxHistory adjoint_solve(const MediumFields& medium, const ScatteringKernel& kernel,
                                 const AngularQuadrature& quad, const TimeGrid& tg,
                                 const BoundaryFluxTrace& zeta, const BoundaryGeometry& boundary) {
    AngularFluxHistory out;
    adjoint_solve_into(out, medium, kernel, quad, tg, zeta, boundary);
    return out;
}

AngularFluxHistory linearized_forward(const MediumFields& medium, const ScatteringKernel& kernel,
                                      const AngularQuadrature& quad, const TimeGrid& tg,
                                      const AngularFluxHistory& base_u, const ScalarField& delta_a,
                                      HistoryStore store) {
    validate_inputs(medium, kernel, quad);
    if (base_u.store != HistoryStore::Substep)
        throw ConfigError("linearized: base history must have substep resolution");
    if (base_u.grid.nx != medium.grid.nx || base_u.grid.ny != medium.grid.ny ||
        base_u.n_dirs != quad.n_dirs || base_u.n_states != tg.total_substeps() + 1)
        throw ConfigError("linearized: base history does not match the instance");
    if (delta_a.nx() != medium.grid.nx || delta_a.ny() != medium.grid.ny)
        throw ConfigError("linearized: perturbation shape mismatch");

    Stepper st(medium, kernel, quad, tg);
    st.check_cfl();

    AngularFluxHistory out;
    out.reset(medium.grid, quad.n_dirs, tg, store);
    const std::size_t len = out.stride();
    const std::size_t plane = out.plane();
    std::vector<double> cur(len, 0.0), nxt(len);
    std::memset(out.state(0), 0, len * sizeof(double));

    const int S = tg.substeps;
    const int M = tg.total_substeps();
    const double dt = tg.dt_sub();
    const int n = quad.n_dirs;

    for (int m = 0; m < M; ++m) {
        st.advect(cur.data(), nxt.data(), false, nullptr);
        // the exact derivative of the implicit collision step samples the
        // base state at the end of the substep, not its start
        const double* u = base_u.state(m + 1);
        parallel_for(n, [&](int k0, int k1) {
            for (int k = k0; k < k1; ++k) {
                double* vk = nxt.data() + static_cast<std::size_t>(k) * plane;
                const double* uk = u + static_cast<std::size_t>(k) * plane;
                for (std::size_t c = 0; c < plane; ++c)
                    vk[c] -= dt * delta_a[c] * uk[c];
            }
        });
        st.collide(nxt.data());
        cur.swap(nxt);
        if (store == HistoryStore::Substep)
            std::memcpy(out.state(m + 1), cur.data(), len * sizeof(double));
        if ((m + 1) % S == 0) {
            if (store == HistoryStore::Recorded)
                std::memcpy(out.state((m + 1) / S), cur.data(), len * sizeof(double));
            check_finite(cur.data(), len);
        }
    }
    return out;
}

ScalarField correlate(const AngularFluxHistory& u, const AngularFluxHistory& z,
                      const AngularQuadrature& quad) {
    if (u.store != HistoryStore::Substep || z.store != HistoryStore::Substep)
        throw ConfigError("correlate: both histories need substep resolution");
    if (u.grid.nx != z.grid.nx || u.grid.ny != z.grid.ny || u.n_dirs != z.n_dirs ||
        u.n_states != z.n_states || u.n_dirs != quad.n_dirs)
        throw ConfigError("correlate: history shapes differ");

    const std::size_t plane = u.plane();
    const int n = u.n_dirs;
    const double scale = quad.weight * u.tg.dt_sub();

    ScalarField acc(u.grid.nx, u.grid.ny, 0.0);
    parallel_for(u.grid.ny, [&](int y0, int y1) {
        const std::size_t c0 = static_cast<std::size_t>(y0) * u.grid.nx;
        const std::size_t c1 = static_cast<std::size_t>(y1) * u.grid.nx;
        for (int s = 0; s < u.n_states; ++s) {
            const double* us = u.state(s);
            const double* zs = z.state(s);
            for (int k = 0; k < n; ++k) {
                const double* uk = us + static_cast<std::size_t>(k) * plane;
                const double* zk = zs + static_cast<std::size_t>(k) * plane;
                for (std::size_t c = c0; c < c1; ++c)
                    acc[c] += uk[c] * zk[c];
            }
        }
    });
    for (std::size_t c = 0; c < acc.size(); ++c)
        acc[c] *= scale;
    return acc;
}

ScalarField misfit_gradient(const AngularFluxHistory& u, const AngularFluxHistory& z,
                            const AngularQuadrature& quad) {
    ScalarField g = correlate(u, z, quad);
    for (std::size_t c = 0; c < g.size(); ++c)
        g[c] = -g[c];
    return g;
}

} // namespace dotshape
