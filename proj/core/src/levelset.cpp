#include "dotshape/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "dotshape/errors.hpp"

namespace dotshape {

MaskField heaviside_map(const ScalarField& phi) {
    MaskField mask(phi.nx(), phi.ny(), 0);
    for (int c = 0; c < phi.nx() * phi.ny(); ++c) mask[c] = (phi[c] <= 0.0) ? 1 : 0;
    return mask;
}

ScalarField lambda_map(const ScalarField& phi, double a_hat, const ScalarField& a_b) {
    if (!phi.same_shape(a_b)) throw ConfigError("lambda_map: phi and a_b shapes differ");
    ScalarField a_s(phi.nx(), phi.ny(), 0.0);
    for (int c = 0; c < phi.nx() * phi.ny(); ++c)
        if (phi[c] <= 0.0) a_s[c] = a_hat - a_b[c];
    return a_s;
}

BandMask extract_band(const ScalarField& phi, double rho) {
    if (rho < 1.0) throw ConfigError("extract_band: band half-width rho must be >= 1 cell");
    const int nx = phi.nx();
    const int ny = phi.ny();
    MaskField inside = heaviside_map(phi);

    BandMask band;
    band.cells = MaskField(nx, ny, 0);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            if (ix + 1 < nx && inside(ix, iy) != inside(ix + 1, iy))
                band.faces.push_back({ix, iy, 0});
            if (iy + 1 < ny && inside(ix, iy) != inside(ix, iy + 1))
                band.faces.push_back({ix, iy, 1});
        }

    // A face midpoint sits half a cell off-center along its axis; stamp every
    // cell center within Chebyshev distance rho of it.
    for (const BandFace& f : band.faces) {
        const double mx = f.ix + (f.axis == 0 ? 0.5 : 0.0);
        const double my = f.iy + (f.axis == 1 ? 0.5 : 0.0);
        const int x0 = std::max(0, (int)std::ceil(mx - rho));
        const int x1 = std::min(nx - 1, (int)std::floor(mx + rho));
        const int y0 = std::max(0, (int)std::ceil(my - rho));
        const int y1 = std::min(ny - 1, (int)std::floor(my + rho));
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix) band.cells(ix, iy) = 1;
    }
    return band;
}

double max_band_update(const ScalarField& corr, const BandMask& band, double a_hat,
                       const ScalarField& a_b, const MaskField* update_mask) {
    if (!corr.same_shape(band.cells) || !corr.same_shape(a_b))
        throw ConfigError("max_band_update: shape mismatch");
    double m = 0.0;
    for (int c = 0; c < corr.nx() * corr.ny(); ++c) {
        if (!band.cells[c]) continue;
        if (update_mask && !(*update_mask)[c]) continue;
        m = std::max(m, std::abs((a_hat - a_b[c]) * corr[c]));
    }
    return m;
}

ScalarField levelset_update(const ScalarField& phi, const ScalarField& corr, const BandMask& band,
                            double eta, double a_hat, const ScalarField& a_b,
                            const MaskField* update_mask, double max_step) {
    if (!phi.same_shape(corr) || !phi.same_shape(band.cells) || !phi.same_shape(a_b))
        throw ConfigError("levelset_update: shape mismatch");

    double scale = 1.0;
    if (max_step > 0.0) {
        const double raw = eta * max_band_update(corr, band, a_hat, a_b, update_mask);
        if (raw > max_step) scale = max_step / raw;
    }

    ScalarField out = phi;
    for (int c = 0; c < phi.nx() * phi.ny(); ++c) {
        if (!band.cells[c]) continue;
        if (update_mask && !(*update_mask)[c]) continue;
        out[c] = phi[c] - scale * eta * (a_hat - a_b[c]) * corr[c];
    }
    return out;
}

ScalarField rescale(const ScalarField& phi, double target) {
    if (target <= 0.0) throw ConfigError("rescale: target must be positive");
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < phi.nx() * phi.ny(); ++c) {
        mn = std::min(mn, phi[c]);
        mx = std::max(mx, phi[c]);
    }
    if (mn == 0.0 && mx == 0.0) throw NumericError("rescale: phi is identically zero");
    const double ref = (mn < 0.0) ? -mn : mx;
    const double scale = target / ref;
    ScalarField out = phi;
    for (int c = 0; c < out.nx() * out.ny(); ++c) out[c] *= scale;
    return out;
}

ScalarField init_from_tbt(const ScalarField& a_tbt, double a_hat, const ScalarField& a_b,
                          double gamma_ls, double rescale_target, const MaskField* update_mask) {
    if (!a_tbt.same_shape(a_b)) throw ConfigError("init_from_tbt: shape mismatch");
    if (gamma_ls <= 0.0 || gamma_ls >= 1.0)
        throw ConfigError("init_from_tbt: gamma must lie in (0,1)");

    int sign = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    int counted = 0;
    for (int c = 0; c < a_tbt.nx() * a_tbt.ny(); ++c) {
        if (update_mask && !(*update_mask)[c]) continue;
        const double contrast = a_hat - a_b[c];
        const int s = (contrast > 0.0) ? 1 : (contrast < 0.0 ? -1 : 0);
        if (s == 0) throw ConfigError("init_from_tbt: a_hat equals the background somewhere");
        if (sign == 0) sign = s;
        if (s != sign) throw ConfigError("init_from_tbt: contrast changes sign over the domain");
        lo = std::min(lo, a_tbt[c]);
        hi = std::max(hi, a_tbt[c]);
        ++counted;
    }
    if (counted == 0) throw ConfigError("init_from_tbt: update mask excludes every cell");
    if (!(hi > lo)) throw NumericError("init_from_tbt: TBT image is constant, no contrast to threshold");

    const double a_ls = gamma_ls * (sign > 0 ? hi : lo);
    ScalarField phi(a_tbt.nx(), a_tbt.ny(), 0.0);
    double amp = 0.0;
    for (int c = 0; c < phi.nx() * phi.ny(); ++c) {
        phi[c] = sign * (a_ls - a_tbt[c]);
        amp = std::max(amp, std::abs(phi[c]));
    }
    if (update_mask) {
        // Known-clear cells must start strictly outside the shape.
        for (int c = 0; c < phi.nx() * phi.ny(); ++c)
            if (!(*update_mask)[c]) phi[c] = amp;
    }
    return rescale(phi, rescale_target);
}

std::vector<ShapeComponent> connected_components(const MaskField& mask) {
    const int nx = mask.nx();
    const int ny = mask.ny();
    std::vector<int> label(nx * ny, 0);
    std::vector<ShapeComponent> comps;
    std::deque<int> queue;

    for (int start = 0; start < nx * ny; ++start) {
        if (!mask[start] || label[start]) continue;
        ShapeComponent comp;
        comp.label = (int)comps.size() + 1;
        label[start] = comp.label;
        queue.push_back(start);
        while (!queue.empty()) {
            const int c = queue.front();
            queue.pop_front();
            const int ix = c % nx;
            const int iy = c / nx;
            comp.area_px += 1;
            comp.cx += ix;
            comp.cy += iy;
            const int nbrs[4] = {ix > 0 ? c - 1 : -1, ix + 1 < nx ? c + 1 : -1,
                                 iy > 0 ? c - nx : -1, iy + 1 < ny ? c + nx : -1};
            for (int nb : nbrs) {
                if (nb < 0 || !mask[nb] || label[nb]) continue;
                label[nb] = comp.label;
                queue.push_back(nb);
            }
        }
        comp.cx /= comp.area_px;
        comp.cy /= comp.area_px;
        comps.push_back(comp);
    }
    return comps;
}

std::vector<ShapeComponent> extract_shape(const ScalarField& phi) {
    return connected_components(heaviside_map(phi));
}

} // namespace dotshape
