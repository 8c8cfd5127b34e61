#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dotshape/kernel.hpp"

using namespace dotshape;

TEST_CASE("raw Henyey-Greenstein density hits the forward-peak value") {
    // (1 - g^2) / (2 (1 + g^2 - 2 g cos)^{3/2}) at g = 0.9, cos = 1:
    // 0.19 / (2 * 0.001) = 95
    CHECK(hg_raw(0.9, 1.0) == doctest::Approx(95.0).epsilon(1e-9));
    CHECK(hg_raw(0.0, 0.3) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("isotropic kernel is the constant 1/(2*pi)") {
    const AngularQuadrature q = make_quadrature(12);
    const ScatteringKernel K = hg_kernel(q, 0.0);
    for (int i = 0; i < q.n_dirs; ++i)
        for (int j = 0; j < q.n_dirs; ++j)
            CHECK(K.at(i, j) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("kernel rows integrate to one and the matrix is symmetric") {
    for (int n : {4, 12, 16}) {
        const AngularQuadrature q = make_quadrature(n);
        for (double g : {0.0, 0.5, 0.9}) {
            const ScatteringKernel K = hg_kernel(q, g);
            for (int i = 0; i < n; ++i) {
                double row = 0.0;
                for (int j = 0; j < n; ++j) {
                    row += K.at(i, j) * q.weight;
                    CHECK(K.at(i, j) == K.at(j, i));   // exact by construction
                    CHECK(K.at(i, j) > 0.0);
                }
                CHECK(std::abs(row - 1.0) <= 1e-13);
            }
        }
    }
}

TEST_CASE("kernel is circulant in the direction offset") {
    const AngularQuadrature q = make_quadrature(12);
    const ScatteringKernel K = hg_kernel(q, 0.9);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            CHECK(K.at(i, j) == K.at(0, (j - i + 12) % 12));
}

TEST_CASE("forward peak dominates for anisotropic scattering") {
    const AngularQuadrature q = make_quadrature(12);
    const ScatteringKernel K = hg_kernel(q, 0.9);
    for (int j = 1; j < 12; ++j) CHECK(K.at(0, 0) > K.at(0, j));
    // monotone decay toward the backward direction
    for (int j = 0; j < 6; ++j) CHECK(K.at(0, j) > K.at(0, j + 1));
}
