#pragma once

#include <vector>

#include "dotshape/grid.hpp"

namespace dotshape {

/// Discrete scattering phase matrix on a direction set. Rows are normalized
/// so that sum_j K[i][j] * w == 1, which makes the collision step conserve
/// particles when absorption vanishes.
struct ScatteringKernel {
    int n_dirs = 0;
    double g = 0.0;
    std::vector<double> k;   // row-major n_dirs x n_dirs

    double at(int i, int j) const { return k[static_cast<std::size_t>(i) * n_dirs + j]; }
};

/// Henyey-Greenstein density before normalization.
double hg_raw(double g, double cos_theta);

/// Builds the HG matrix for equispaced directions. The matrix is circulant
/// (entries depend on |i-j| mod n only) and exactly symmetric; one common
/// normalization factor keeps it that way.
ScatteringKernel hg_kernel(const AngularQuadrature& quad, double g);

} // namespace dotshape
