#include "dotshape/grid.hpp"

#include <cmath>
#include <numbers>

#include "dotshape/errors.hpp"

namespace dotshape {

GridSpec::GridSpec(int nx_, int ny_, double dx_) : nx(nx_), ny(ny_), dx(dx_) {
    if (nx < 4 || ny < 4)
        throw ConfigError("grid: nx and ny must be at least 4");
    if (!(dx > 0.0))
        throw ConfigError("grid: dx must be positive");
}

AngularQuadrature make_quadrature(int n) {
    if (n < 4)
        throw ConfigError("quadrature: need at least 4 directions");
    if (n % 2 != 0)
        throw ConfigError("quadrature: direction count must be even");
    AngularQuadrature q;
    q.n_dirs = n;
    q.weight = 2.0 * std::numbers::pi / n;
    q.dirs.resize(n);
    for (int k = 0; k < n; ++k) {
        const double ang = 2.0 * std::numbers::pi * k / n;
        q.dirs[k] = {std::cos(ang), std::sin(ang)};
    }
    return q;
}

TimeGrid::TimeGrid(double dt_rec_, int n_rec_, int substeps_, double c_)
    : dt_rec(dt_rec_), n_rec(n_rec_), substeps(substeps_), c(c_) {
    if (!(dt_rec > 0.0))
        throw ConfigError("time: dt_rec must be positive");
    if (n_rec < 1)
        throw ConfigError("time: n_rec must be at least 1");
    if (substeps < 1)
        throw ConfigError("time: substeps must be at least 1");
    if (!(c > 0.0))
        throw ConfigError("time: speed c must be positive");
}

std::array<double, 2> side_normal(Side s) {
    switch (s) {
    case Side::Left:   return {-1.0, 0.0};
    case Side::Right:  return {1.0, 0.0};
    case Side::Bottom: return {0.0, -1.0};
    default:           return {0.0, 1.0};
    }
}

namespace {

Side classify(int ix, int iy, int nx, int /*ny*/) {
    if (ix == 0) return Side::Left;
    if (ix == nx - 1) return Side::Right;
    if (iy == 0) return Side::Bottom;
    return Side::Top;
}

} // namespace

double BoundaryGeometry::arc_distance(int i, int j) const {
    const double d = std::abs(pixels[i].arc - pixels[j].arc);
    return std::min(d, perimeter - d);
}

BoundaryGeometry build_boundary(const GridSpec& grid) {
    BoundaryGeometry bg;
    bg.dx = grid.dx;
    bg.index_of = Field<int>(grid.nx, grid.ny, -1);

    const int nx = grid.nx;
    const int ny = grid.ny;
    std::vector<std::pair<int, int>> walk;
    walk.reserve(2 * (nx + ny) - 4);
    for (int ix = 0; ix < nx; ++ix) walk.emplace_back(ix, 0);
    for (int iy = 1; iy < ny; ++iy) walk.emplace_back(nx - 1, iy);
    for (int ix = nx - 2; ix >= 0; --ix) walk.emplace_back(ix, ny - 1);
    for (int iy = ny - 2; iy >= 1; --iy) walk.emplace_back(0, iy);

    bg.pixels.reserve(walk.size());
    for (std::size_t i = 0; i < walk.size(); ++i) {
        const auto [ix, iy] = walk[i];
        BoundaryPixel p;
        p.ix = ix;
        p.iy = iy;
        p.side = classify(ix, iy, nx, ny);
        p.arc = (i + 0.5) * grid.dx;
        bg.index_of(ix, iy) = static_cast<int>(i);
        bg.pixels.push_back(p);
    }
    bg.perimeter = static_cast<double>(walk.size()) * grid.dx;
    return bg;
}

} // namespace dotshape
