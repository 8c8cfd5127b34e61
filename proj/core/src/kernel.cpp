#include "dotshape/kernel.hpp"

#include <cmath>
#include <numbers>

#include "dotshape/errors.hpp"

namespace dotshape {

double hg_raw(double g, double cos_theta) {
    const double denom = 1.0 + g * g - 2.0 * g * cos_theta;
    return (1.0 - g * g) / (2.0 * std::pow(denom, 1.5));
}

ScatteringKernel hg_kernel(const AngularQuadrature& quad, double g) {
    if (!(std::abs(g) < 1.0))
        throw ConfigError("kernel: anisotropy must satisfy |g| < 1");
    const int n = quad.n_dirs;

    // Circulant generator over the canonical angle difference; using
    // min(d, n-d) makes symmetry exact in floating point.
    std::vector<double> gen(n);
    for (int d = 0; d < n; ++d) {
        const int dc = std::min(d, n - d);
        const double cos_t = std::cos(2.0 * std::numbers::pi * dc / n);
        gen[d] = hg_raw(g, cos_t);
    }
    double row_sum = 0.0;
    for (int d = 0; d < n; ++d)
        row_sum += gen[d];
    const double scale = 1.0 / (quad.weight * row_sum);

    ScatteringKernel kern;
    kern.n_dirs = n;
    kern.g = g;
    kern.k.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int d = i - j;
            if (d < 0)
                d += n;
            const int dc = std::min(d, n - d);
            kern.k[static_cast<std::size_t>(i) * n + j] = gen[dc] * scale;
        }
    return kern;
}

} // namespace dotshape
