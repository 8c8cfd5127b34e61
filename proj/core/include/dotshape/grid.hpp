#pragma once

#include <array>
#include <vector>

#include "dotshape/field.hpp"

namespace dotshape {

/// Uniform square-cell grid over [0, nx*dx] x [0, ny*dx].
/// Cell (ix, iy) has its center at ((ix+0.5)*dx, (iy+0.5)*dx).
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;

    GridSpec() = default;
    GridSpec(int nx_, int ny_, double dx_);

    int cells() const { return nx * ny; }
    double lx() const { return nx * dx; }
    double ly() const { return ny * dx; }
    double cell_area() const { return dx * dx; }
    double cx(int ix) const { return (ix + 0.5) * dx; }
    double cy(int iy) const { return (iy + 0.5) * dx; }
};

/// Equispaced directions on the unit circle with the uniform weight 2*pi/n.
struct AngularQuadrature {
    int n_dirs = 0;
    double weight = 0.0;                        // 2*pi / n_dirs
    std::vector<std::array<double, 2>> dirs;    // (cos, sin) of 2*pi*k/n

    double tx(int k) const { return dirs[k][0]; }
    double ty(int k) const { return dirs[k][1]; }
};

/// n must be even (opposing-direction pairs are required by the adjoint
/// time reversal) and at least 4.
AngularQuadrature make_quadrature(int n);

/// Recording cadence dt_rec split into CFL-limited solver substeps.
struct TimeGrid {
    double dt_rec = 0.0;
    int n_rec = 0;
    int substeps = 1;
    double c = 1.0;

    TimeGrid() = default;
    TimeGrid(double dt_rec_, int n_rec_, int substeps_, double c_);

    double dt_sub() const { return dt_rec / substeps; }
    int total_substeps() const { return n_rec * substeps; }
    double horizon() const { return dt_rec * n_rec; }
    double t_rec(int i) const { return i * dt_rec; }   // i in [0, n_rec]
    double courant(double dx) const { return dt_sub() * c / dx; }
};

enum class Side : int { Left = 0, Right = 1, Bottom = 2, Top = 3 };

/// Outward unit normal of a side.
std::array<double, 2> side_normal(Side s);

struct BoundaryPixel {
    int ix = 0;
    int iy = 0;
    Side side = Side::Left;   // assigned normal; corners use the priority
                              // order left, right, bottom, top
    double arc = 0.0;         // arc-length coordinate of the pixel center
};

/// Ordered walk of the boundary pixels: bottom row left to right, right
/// column up, top row right to left, left column down. Each pixel owns dx
/// of boundary, so the walk length is (2*(nx+ny)-4) * dx.
struct BoundaryGeometry {
    std::vector<BoundaryPixel> pixels;
    Field<int> index_of;      // grid -> boundary index, -1 for interior
    double perimeter = 0.0;
    double dx = 0.0;

    int count() const { return static_cast<int>(pixels.size()); }

    /// Shorter way around the closed perimeter between two pixel centers.
    double arc_distance(int i, int j) const;
};

BoundaryGeometry build_boundary(const GridSpec& grid);

} // namespace dotshape
