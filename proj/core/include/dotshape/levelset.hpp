#pragma once

#include <vector>

#include "dotshape/field.hpp"

namespace dotshape {

/// Level-set description of the two-valued absorption image.
struct ShapeParams {
    double a_hat = 0.5;          // absorption inside the shape [1/cm]
    double gamma_ls = 0.9;       // fraction of the TBT extremum for phi0
    double rho = 1.0;            // band half-width in cells (Chebyshev)
    double rescale_target = 1.0; // |min phi| (or max phi) after rescale
};

/// Shape indicator: 1 where phi <= 0.
MaskField heaviside_map(const ScalarField& phi);

/// Two-valued absorption increment a_s(x) = Psi_phi(x) * (a_hat - a_b(x)).
ScalarField lambda_map(const ScalarField& phi, double a_hat, const ScalarField& a_b);

/// Interface face between two 4-neighbors with opposite indicator values.
/// axis 0: between (ix,iy) and (ix+1,iy); axis 1: towards (ix,iy+1).
struct BandFace {
    int ix = 0;
    int iy = 0;
    int axis = 0;
};

struct BandMask {
    MaskField cells;
    std::vector<BandFace> faces;
    bool empty() const { return faces.empty(); }
};

/// Cells whose center lies within Chebyshev distance rho (in cells) of some
/// interface face midpoint. rho < 1 is rejected.
BandMask extract_band(const ScalarField& phi, double rho);

/// Largest |(a_hat - a_b) * corr| over band cells allowed by update_mask;
/// used to normalize the first step size. update_mask may be null.
double max_band_update(const ScalarField& corr, const BandMask& band, double a_hat,
                       const ScalarField& a_b, const MaskField* update_mask);

/// phi'(x) = phi(x) - eta * (a_hat - a_b(x)) * corr(x) on band cells passed
/// by update_mask; everywhere else phi is copied bit for bit. When max_step
/// is positive the whole increment is scaled down so no cell moves more
/// than that.
ScalarField levelset_update(const ScalarField& phi, const ScalarField& corr, const BandMask& band,
                            double eta, double a_hat, const ScalarField& a_b,
                            const MaskField* update_mask, double max_step = 0.0);

/// Scales phi by a positive factor so |min phi| (or max phi when the shape
/// is empty) equals target. The sign pattern, and hence the shape, is
/// preserved exactly. phi identically zero is rejected.
ScalarField rescale(const ScalarField& phi, double target);

/// Initial level-set from a TBT absorption image: threshold at
/// a_ls = gamma * extremum(a_tbt) over the update mask and set
/// phi = sign(a_hat - a_b) * (a_ls - a_tbt), then rescale. Cells outside
/// the update mask start strictly outside the shape. A constant a_tbt
/// (no contrast) is rejected.
ScalarField init_from_tbt(const ScalarField& a_tbt, double a_hat, const ScalarField& a_b,
                          double gamma_ls, double rescale_target, const MaskField* update_mask);

struct ShapeComponent {
    int label = 0;
    int area_px = 0;
    double cx = 0.0;   // centroid in pixel coordinates (cell centers)
    double cy = 0.0;
};

/// 4-connected components of the shape D[phi] = {phi <= 0}.
std::vector<ShapeComponent> extract_shape(const ScalarField& phi);
std::vector<ShapeComponent> connected_components(const MaskField& mask);

} // namespace dotshape
