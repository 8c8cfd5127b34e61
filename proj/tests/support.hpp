#pragma once

#include <cmath>
#include <random>

#include "dotshape/adjoint.hpp"
#include "dotshape/medium.hpp"
#include "dotshape/transport.hpp"

namespace testsupport {

using namespace dotshape;

inline MediumFields uniform_medium(const GridSpec& g, double a, double b) {
    MediumFields m(g);
    m.a.fill(a);
    m.b.fill(b);
    return m;
}

inline ScalarField random_field(const GridSpec& g, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(g.nx, g.ny);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
    return f;
}

/// Unmasked trace (every receiver, every recorded step) with uniform noise.
inline BoundaryFluxTrace random_trace(const BoundaryGeometry& boundary, const TimeGrid& tg,
                                      std::uint64_t seed) {
    BoundaryFluxTrace t;
    t.n_boundary = boundary.count();
    t.n_rec = tg.n_rec;
    t.dt_rec = tg.dt_rec;
    t.window_start = 1;
    t.receiver_mask.assign(t.n_boundary, 1);
    t.v.assign(static_cast<std::size_t>(t.n_boundary) * tg.n_rec, 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& x : t.v) x = dist(rng);
    return t;
}

/// Plain (unweighted) sums; the transpose identities are stated in these.
inline double dot_plain(const BoundaryFluxTrace& x, const BoundaryFluxTrace& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.v.size(); ++i) s += x.v[i] * y.v[i];
    return s;
}

inline double dot_plain(const ScalarField& x, const ScalarField& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm_plain(const BoundaryFluxTrace& x) { return std::sqrt(dot_plain(x, x)); }
inline double norm_plain(const ScalarField& x) { return std::sqrt(dot_plain(x, x)); }

} // namespace testsupport
