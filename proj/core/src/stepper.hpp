#pragma once

// Internal stepping machinery shared by the forward, linearized, and
// adjoint solvers. Not installed.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "dotshape/errors.hpp"
#include "dotshape/threading.hpp"
#include "dotshape/transport.hpp"

namespace dotshape::internal {

// Reciprocal collision eigenvalues per cell: the implicit step solves
// ((1 + dt*(a+b)) I - dt*b*wK) u_new = u_old in the shared Fourier basis.
inline Eigen::MatrixXd build_collision_scaling(const MediumFields& medium,
                                               const detail::CollisionTransform& t, double dt) {
    const int ncells = medium.grid.cells();
    const int n = t.n_dirs;
    Eigen::MatrixXd d(ncells, n);
    for (int m = 0; m < n; ++m) {
        const double kap = t.kappa[m];
        for (int c = 0; c < ncells; ++c) {
            const double a = medium.a[c];
            const double b = medium.b[c];
            d(c, m) = 1.0 / (1.0 + dt * (a + b) - dt * b * kap);
        }
    }
    return d;
}

struct Stepper {
    int nx, ny, n, ncells;
    double cfl;
    const AngularQuadrature* quad;
    detail::CollisionTransform transform;
    Eigen::MatrixXd scaling;      // ncells x n
    std::vector<double> work;     // GEMM workspace, ncells * n

    Stepper(const MediumFields& medium, const ScatteringKernel& kernel,
            const AngularQuadrature& q, const TimeGrid& tg)
        : nx(medium.grid.nx), ny(medium.grid.ny), n(q.n_dirs), ncells(medium.grid.cells()),
          cfl(tg.courant(medium.grid.dx)), quad(&q),
          transform(detail::build_collision_transform(q, kernel)),
          scaling(build_collision_scaling(medium, transform, tg.dt_sub())),
          work(static_cast<std::size_t>(ncells) * n) {}

    void check_cfl() const {
        double worst = 0.0;
        for (int k = 0; k < n; ++k)
            worst = std::max(worst, std::abs(quad->tx(k)) + std::abs(quad->ty(k)));
        if (worst * cfl > 1.0 + 1e-12)
            throw NumericError("transport: substep violates the donor-cell CFL bound");
    }

    // advected[k] = B(theta_k) state[k]; reverse advects along -theta.
    void advect(const double* state, double* advected, bool reverse, std::vector<double>* ofk) {
        const double sgn = reverse ? -1.0 : 1.0;
        parallel_for(n, [&](int k0, int k1) {
            for (int k = k0; k < k1; ++k) {
                const std::size_t off = static_cast<std::size_t>(k) * ncells;
                detail::advect_plane(state + off, advected + off, nx, ny, sgn * quad->tx(k),
                                     sgn * quad->ty(k), cfl, ofk ? &(*ofk)[k] : nullptr);
            }
        });
    }

    void collide(double* state) {
        Eigen::Map<const Eigen::MatrixXd> q(transform.basis.data(), n, n);
        Eigen::Map<Eigen::MatrixXd> v(state, ncells, n);
        Eigen::Map<Eigen::MatrixXd> h(work.data(), ncells, n);
        h.noalias() = v * q;
        h.array() *= scaling.array();
        v.noalias() = h * q.transpose();
    }
};

inline void check_finite(const double* p, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i)
        if (!std::isfinite(p[i]))
            throw NumericError("transport: non-finite state value");
}

inline void validate_inputs(const MediumFields& medium, const ScatteringKernel& kernel,
                            const AngularQuadrature& quad) {
    medium.validate();
    if (kernel.n_dirs != quad.n_dirs)
        throw ConfigError("transport: kernel and quadrature direction counts differ");
}

} // namespace dotshape::internal
