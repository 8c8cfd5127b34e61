#pragma once

#include <vector>

#include "dotshape/field.hpp"
#include "dotshape/grid.hpp"

namespace dotshape {

/// Absorption / scattering coefficients plus the masks the inversion needs.
/// frozen cells are excluded from every inversion update; the clear regions
/// are always frozen.
struct MediumFields {
    GridSpec grid;
    ScalarField a;          // absorption [1/cm]
    ScalarField b;          // scattering [1/cm]
    MaskField clear_mask;
    MaskField frozen_mask;

    MediumFields() = default;
    explicit MediumFields(const GridSpec& g);

    /// a and b finite and nonnegative, masks consistent. Throws on violation.
    void validate() const;
};

struct Disc {
    double cx = 0.0;   // center [cm]
    double cy = 0.0;
    double r = 0.0;    // radius [cm]
};

struct ObstacleDisc {
    Disc disc;
    double a = 0.0;    // absorption value inside [1/cm]
};

/// Rectangular ring of clear cells: boundary distance (in cells) within
/// [offset, offset + thickness - 1].
struct ClearLayer {
    bool enabled = false;
    int offset_px = 5;
    int thickness_px = 3;
};

/// Piecewise-constant test medium, painted in the order background, clear
/// layer, clear discs, obstacle discs. Cells belong to a disc when their
/// center lies inside it.
struct PhantomSpec {
    double background_a = 0.1;
    double background_b = 100.0;
    double clear_a = 0.01;
    double clear_b = 0.01;
    ClearLayer clear_layer;
    std::vector<Disc> clear_discs;
    std::vector<ObstacleDisc> obstacles;
};

/// Obstacles overlapping a clear cell are rejected. The result satisfies
/// min(a) > 0 and min(b) > 0.
MediumFields build_phantom(const GridSpec& grid, const PhantomSpec& spec);

/// Same phantom without its obstacles: the medium the inversion assumes
/// known (background plus clear regions).
MediumFields build_reconstruction_base(const GridSpec& grid, const PhantomSpec& spec);

bool cell_in_disc(const GridSpec& grid, int ix, int iy, const Disc& d);

} // namespace dotshape
