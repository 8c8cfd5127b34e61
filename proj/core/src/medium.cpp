#include "dotshape/medium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dotshape/errors.hpp"

namespace dotshape {

MediumFields::MediumFields(const GridSpec& g)
    : grid(g),
      a(g.nx, g.ny, 0.0),
      b(g.nx, g.ny, 0.0),
      clear_mask(g.nx, g.ny, 0),
      frozen_mask(g.nx, g.ny, 0) {}

void MediumFields::validate() const {
    if (a.nx() != grid.nx || a.ny() != grid.ny || !a.same_shape(b) ||
        clear_mask.nx() != grid.nx || clear_mask.ny() != grid.ny ||
        frozen_mask.nx() != grid.nx || frozen_mask.ny() != grid.ny)
        throw ConfigError("medium: field shapes do not match the grid");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
            throw ConfigError("medium: non-finite coefficient");
        if (a[i] < 0.0 || b[i] < 0.0)
            throw ConfigError("medium: coefficients must be nonnegative");
        if (clear_mask[i] && !frozen_mask[i])
            throw ConfigError("medium: clear cells must be frozen");
    }
}

bool cell_in_disc(const GridSpec& grid, int ix, int iy, const Disc& d) {
    const double px = grid.cx(ix) - d.cx;
    const double py = grid.cy(iy) - d.cy;
    return px * px + py * py <= d.r * d.r;
}

namespace {

int boundary_distance(int ix, int iy, int nx, int ny) {
    return std::min(std::min(ix, nx - 1 - ix), std::min(iy, ny - 1 - iy));
}

MediumFields paint(const GridSpec& grid, const PhantomSpec& spec, bool with_obstacles) {
    MediumFields m(grid);
    m.a.fill(spec.background_a);
    m.b.fill(spec.background_b);

    auto set_clear = [&](int ix, int iy) {
        m.a(ix, iy) = spec.clear_a;
        m.b(ix, iy) = spec.clear_b;
        m.clear_mask(ix, iy) = 1;
        m.frozen_mask(ix, iy) = 1;
    };

    if (spec.clear_layer.enabled) {
        const ClearLayer& cl = spec.clear_layer;
        if (cl.offset_px < 0 || cl.thickness_px < 1)
            throw ConfigError("phantom: invalid clear layer geometry");
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int ix = 0; ix < grid.nx; ++ix) {
                const int d = boundary_distance(ix, iy, grid.nx, grid.ny);
                if (d >= cl.offset_px && d < cl.offset_px + cl.thickness_px)
                    set_clear(ix, iy);
            }
    }
    for (const Disc& d : spec.clear_discs) {
        if (d.r < 0.0)
            throw ConfigError("phantom: negative disc radius");
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int ix = 0; ix < grid.nx; ++ix)
                if (cell_in_disc(grid, ix, iy, d))
                    set_clear(ix, iy);
    }
    if (with_obstacles) {
        for (std::size_t oi = 0; oi < spec.obstacles.size(); ++oi) {
            const ObstacleDisc& o = spec.obstacles[oi];
            if (o.disc.r < 0.0)
                throw ConfigError("phantom: negative disc radius");
            if (!(o.a > 0.0))
                throw ConfigError("phantom: obstacle absorption must be positive");
            for (int iy = 0; iy < grid.ny; ++iy)
                for (int ix = 0; ix < grid.nx; ++ix)
                    if (cell_in_disc(grid, ix, iy, o.disc)) {
                        if (m.clear_mask(ix, iy))
                            throw ConfigError("phantom: obstacle " + std::to_string(oi) +
                                              " overlaps a clear region");
                        m.a(ix, iy) = o.a;
                    }
        }
    }

    m.validate();
    for (std::size_t i = 0; i < m.a.size(); ++i)
        if (!(m.a[i] > 0.0) || !(m.b[i] > 0.0))
            throw ConfigError("phantom: coefficients must be strictly positive");
    return m;
}

} // namespace

MediumFields build_phantom(const GridSpec& grid, const PhantomSpec& spec) {
    return paint(grid, spec, true);
}

MediumFields build_reconstruction_base(const GridSpec& grid, const PhantomSpec& spec) {
    return paint(grid, spec, false);
}

} // namespace dotshape
