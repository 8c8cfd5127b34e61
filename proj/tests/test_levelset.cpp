#include <algorithm>
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "dotshape/errors.hpp"
#include "dotshape/levelset.hpp"
#include "support.hpp"

using namespace dotshape;
using testsupport::random_field;

namespace {

ScalarField vertical_split(const GridSpec& g, int first_inside_col) {
    // phi < 0 for ix >= first_inside_col, measured in whole cells
    ScalarField phi(g.nx, g.ny);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            phi(ix, iy) = (first_inside_col - ix) - 0.5;
    return phi;
}

} // namespace

TEST_CASE("heaviside map marks nonpositive cells, zero included") {
    ScalarField phi(4, 4, 1.0);
    phi(1, 1) = -2.0;
    phi(2, 2) = 0.0;
    phi(3, 0) = -0.0;
    const MaskField h = heaviside_map(phi);
    for (int iy = 0; iy < 4; ++iy)
        for (int ix = 0; ix < 4; ++ix) {
            const bool in = (ix == 1 && iy == 1) || (ix == 2 && iy == 2) || (ix == 3 && iy == 0);
            CHECK(h(ix, iy) == (in ? 1 : 0));
        }
}

TEST_CASE("lambda map carries the per-cell contrast inside the shape") {
    const GridSpec g{6, 5, 0.1};
    const ScalarField a_b = random_field(g, 0.05, 0.3, 11);
    ScalarField phi(g.nx, g.ny, 1.0);
    phi(2, 3) = -1.0;
    phi(4, 1) = 0.0;
    const ScalarField a_s = lambda_map(phi, 0.5, a_b);
    for (int c = 0; c < g.cells(); ++c) {
        if (phi[c] <= 0.0)
            CHECK(a_s[c] == 0.5 - a_b[c]);   // exact: same expression, same operands
        else
            CHECK(a_s[c] == 0.0);
    }
    CHECK_THROWS_AS(lambda_map(phi, 0.5, ScalarField(3, 3)), ConfigError);
}

TEST_CASE("band of a straight vertical interface is the two adjacent columns") {
    const GridSpec g{10, 7, 0.1};
    const int col = 4;   // first column inside
    const ScalarField phi = vertical_split(g, col);
    const BandMask band = extract_band(phi, 1.0);

    // one axis-0 face per row, between columns col-1 and col
    CHECK((int)band.faces.size() == g.ny);
    for (const BandFace& f : band.faces) {
        CHECK(f.ix == col - 1);
        CHECK(f.axis == 0);
    }
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            CHECK(band.cells(ix, iy) == ((ix == col - 1 || ix == col) ? 1 : 0));
}

TEST_CASE("band of an isolated cell is its full 3x3 neighborhood") {
    ScalarField phi(9, 9, 1.0);
    phi(5, 4) = -1.0;
    const BandMask band = extract_band(phi, 1.0);
    CHECK((int)band.faces.size() == 4);
    int stamped = 0;
    for (int iy = 0; iy < 9; ++iy)
        for (int ix = 0; ix < 9; ++ix) {
            const bool near = std::abs(ix - 5) <= 1 && std::abs(iy - 4) <= 1;
            CHECK(band.cells(ix, iy) == (near ? 1 : 0));
            stamped += band.cells(ix, iy);
        }
    CHECK(stamped == 9);
}

TEST_CASE("uniform sign means an empty band") {
    ScalarField phi(6, 6, 2.0);
    CHECK(extract_band(phi, 1.0).empty());
    phi.fill(-1.0);
    CHECK(extract_band(phi, 1.5).empty());
    CHECK_THROWS_AS(extract_band(phi, 0.5), ConfigError);
}

TEST_CASE("max band update matches a direct scan") {
    const GridSpec g{12, 9, 0.1};
    const ScalarField phi = vertical_split(g, 6);
    const BandMask band = extract_band(phi, 1.0);
    const ScalarField corr = random_field(g, -2.0, 2.0, 21);
    const ScalarField a_b = random_field(g, 0.05, 0.2, 22);
    MaskField allow(g.nx, g.ny, 1);
    allow(5, 0) = 0;
    allow(6, 3) = 0;

    double want = 0.0;
    for (int c = 0; c < g.cells(); ++c)
        if (band.cells[c] && allow[c]) want = std::max(want, std::abs((0.5 - a_b[c]) * corr[c]));
    CHECK(max_band_update(corr, band, 0.5, a_b, &allow) == want);
    CHECK(max_band_update(corr, band, 0.5, a_b, nullptr) >= want);
}

TEST_CASE("level-set update touches only unmasked band cells") {
    const GridSpec g{12, 9, 0.1};
    const ScalarField phi = random_field(g, -1.0, 1.0, 31);
    const BandMask band = extract_band(phi, 1.0);
    REQUIRE(!band.empty());
    const ScalarField corr = random_field(g, -3.0, 3.0, 32);
    const ScalarField a_b = random_field(g, 0.05, 0.2, 33);
    MaskField allow(g.nx, g.ny, 1);
    for (int ix = 0; ix < g.nx; ++ix) allow(ix, 4) = 0;

    const double eta = 0.7;
    const ScalarField next = levelset_update(phi, corr, band, eta, 0.5, a_b, &allow);
    for (int c = 0; c < g.cells(); ++c) {
        if (band.cells[c] && allow[c])
            CHECK(next[c] == phi[c] - eta * (0.5 - a_b[c]) * corr[c]);
        else
            CHECK(std::memcmp(&next[c], &phi[c], sizeof(double)) == 0);   // bit for bit
    }
}

TEST_CASE("max_step caps the update by one global factor") {
    const GridSpec g{10, 10, 0.1};
    const ScalarField phi = vertical_split(g, 5);
    const BandMask band = extract_band(phi, 1.0);
    const ScalarField corr = random_field(g, -5.0, 5.0, 41);
    const ScalarField a_b(g.nx, g.ny, 0.1);

    const double eta = 2.0;
    const double cap = 0.25;
    const double raw = eta * max_band_update(corr, band, 0.5, a_b, nullptr);
    REQUIRE(raw > cap);
    const double scale = cap / raw;

    const ScalarField next = levelset_update(phi, corr, band, eta, 0.5, a_b, nullptr, cap);
    for (int c = 0; c < g.cells(); ++c) {
        if (!band.cells[c]) continue;
        CHECK(next[c] == phi[c] - scale * eta * (0.5 - a_b[c]) * corr[c]);
        CHECK(std::abs(next[c] - phi[c]) <= cap * (1.0 + 1e-15));
    }

    // a generous cap must not rescale anything
    const ScalarField loose = levelset_update(phi, corr, band, eta, 0.5, a_b, nullptr, 2.0 * raw);
    const ScalarField plain = levelset_update(phi, corr, band, eta, 0.5, a_b, nullptr);
    CHECK(loose == plain);
}

TEST_CASE("rescale hits the target amplitude and keeps the shape bitwise") {
    const GridSpec g{8, 8, 0.1};
    for (std::uint64_t seed : {51, 52, 53}) {
        const ScalarField phi = random_field(g, -0.3, 0.7, seed);
        const ScalarField out = rescale(phi, 1.0);
        double mn = out[0], mx = out[0];
        for (int c = 0; c < g.cells(); ++c) {
            mn = std::min(mn, out[c]);
            mx = std::max(mx, out[c]);
        }
        const double ref = (mn < 0.0) ? -mn : mx;
        CHECK(ref == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(heaviside_map(out) == heaviside_map(phi));
    }

    ScalarField pos(4, 4, 0.25);   // empty shape: max is the reference
    const ScalarField out = rescale(pos, 2.0);
    for (int c = 0; c < 16; ++c) CHECK(out[c] == 2.0);

    CHECK_THROWS_AS(rescale(ScalarField(4, 4, 0.0), 1.0), NumericError);
    CHECK_THROWS_AS(rescale(pos, 0.0), ConfigError);
}

TEST_CASE("TBT thresholding puts the strong-absorption cells inside") {
    const GridSpec g{10, 10, 0.1};
    const ScalarField a_b(g.nx, g.ny, 0.1);
    ScalarField a_tbt(g.nx, g.ny, 0.1);
    a_tbt(3, 3) = 0.4;
    a_tbt(3, 4) = 0.35;
    a_tbt(7, 7) = 0.2;

    const double gamma = 0.9;
    const ScalarField phi = init_from_tbt(a_tbt, 0.5, a_b, gamma, 1.0, nullptr);
    const double a_ls = gamma * 0.4;
    const MaskField h = heaviside_map(phi);
    for (int c = 0; c < g.cells(); ++c) CHECK(h[c] == (a_tbt[c] >= a_ls ? 1 : 0));

    // amplitude normalized by rescale
    double mn = phi[0];
    for (int c = 0; c < g.cells(); ++c) mn = std::min(mn, phi[c]);
    CHECK(mn == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("TBT thresholding respects the update mask") {
    const GridSpec g{8, 8, 0.1};
    const ScalarField a_b(g.nx, g.ny, 0.1);
    ScalarField a_tbt(g.nx, g.ny, 0.1);
    a_tbt(2, 2) = 0.5;
    a_tbt(6, 6) = 0.9;   // strongest value sits in a masked cell
    MaskField allow(g.nx, g.ny, 1);
    allow(6, 6) = 0;

    const ScalarField phi = init_from_tbt(a_tbt, 0.5, a_b, 0.9, 1.0, &allow);
    CHECK(phi(6, 6) > 0.0);                       // masked cell stays outside
    CHECK(phi(2, 2) < 0.0);                       // threshold 0.45 from the masked extremum
    CHECK(heaviside_map(phi)(2, 2) == 1);

    CHECK_THROWS_AS(init_from_tbt(ScalarField(g.nx, g.ny, 0.1), 0.5, a_b, 0.9, 1.0, nullptr),
                    NumericError);
    CHECK_THROWS_AS(init_from_tbt(a_tbt, 0.5, a_b, 1.0, 1.0, nullptr), ConfigError);
    CHECK_THROWS_AS(init_from_tbt(a_tbt, 0.1, a_b, 0.9, 1.0, nullptr), ConfigError);
}

TEST_CASE("connected components are 4-connected with exact centroids") {
    MaskField m(10, 8, 0);
    // 2x2 block
    m(1, 1) = m(2, 1) = m(1, 2) = m(2, 2) = 1;
    // single cell, diagonal from the block corner: separate under 4-connectivity
    m(3, 3) = 1;
    // horizontal bar
    m(6, 5) = m(7, 5) = m(8, 5) = 1;

    auto comps = connected_components(m);
    REQUIRE((int)comps.size() == 3);
    std::sort(comps.begin(), comps.end(),
              [](const ShapeComponent& a, const ShapeComponent& b) { return a.area_px > b.area_px; });
    CHECK(comps[0].area_px == 4);
    CHECK(comps[0].cx == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(comps[0].cy == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(comps[1].area_px == 3);
    CHECK(comps[1].cx == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(comps[1].cy == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(comps[2].area_px == 1);
    CHECK(comps[2].cx == doctest::Approx(3.0).epsilon(1e-15));

    CHECK(connected_components(MaskField(5, 5, 0)).empty());
}

TEST_CASE("extract_shape agrees with components of the heaviside map") {
    const GridSpec g{12, 12, 0.1};
    const ScalarField phi = random_field(g, -0.4, 0.6, 61);
    const auto direct = extract_shape(phi);
    const auto via_mask = connected_components(heaviside_map(phi));
    REQUIRE(direct.size() == via_mask.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(direct[i].area_px == via_mask[i].area_px);
        CHECK(direct[i].cx == via_mask[i].cx);
        CHECK(direct[i].cy == via_mask[i].cy);
    }
}

TEST_CASE("randomized level-set invariants") {
    const GridSpec g{16, 16, 0.1};
    const ScalarField a_b(g.nx, g.ny, 0.1);
    MaskField allow(g.nx, g.ny, 1);
    for (int ix = 0; ix < g.nx; ++ix) allow(ix, 0) = 0;

    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const ScalarField phi = random_field(g, -0.5, 0.5, 1000 + seed);
        const BandMask band = extract_band(phi, 1.0);
        const MaskField h = heaviside_map(phi);

        // every face separates opposite indicator values and lies in the band
        for (const BandFace& f : band.faces) {
            const int c0 = f.iy * g.nx + f.ix;
            const int c1 = (f.axis == 0) ? c0 + 1 : c0 + g.nx;
            CHECK(h[c0] != h[c1]);
            CHECK(band.cells[c0] == 1);
            CHECK(band.cells[c1] == 1);
        }

        if (band.empty()) continue;
        const ScalarField corr = random_field(g, -1.0, 1.0, 5000 + seed);
        const ScalarField next = levelset_update(phi, corr, band, 0.8, 0.5, a_b, &allow, 1.0);
        for (int c = 0; c < g.cells(); ++c)
            if (!band.cells[c] || !allow[c]) CHECK(next[c] == phi[c]);

        const ScalarField scaled = rescale(next, 1.0);
        CHECK(heaviside_map(scaled) == heaviside_map(next));
    }
}
