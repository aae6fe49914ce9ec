#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "lamekit/elastodyn.hpp"

// Deterministic initial-condition generators. The random draws avoid
// std::uniform_real_distribution, whose output is not pinned down by the
// standard, so a seed yields the same field on every toolchain.

namespace lamekit {

/// Uniform draw in [-1, 1) from the top 53 bits of a 64-bit engine.
inline double symmetric_unit(std::mt19937_64& rng) {
    return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

/// Sum of low-order modes with random amplitudes decaying like 1/(1+|m|^2).
/// Periodic grids use Fourier modes |m_a| <= kmax (m_3 >= 0); Dirichlet grids
/// use sine products with 1 <= m_a <= kmax, which vanish on the boundary.
inline VectorField3 random_smooth_field(const Grid3& g, std::uint64_t seed, int kmax = 2, double amplitude = 1.0) {
    if (kmax < 1) throw InputError("random_smooth_field: kmax must be at least 1");
    std::mt19937_64 rng(seed);
    VectorField3 u(g);
    const double pi = std::numbers::pi;
    if (g.periodic()) {
        for (std::size_t c = 0; c < 3; ++c)
            for (int a = -kmax; a <= kmax; ++a)
                for (int b = -kmax; b <= kmax; ++b)
                    for (int e = 0; e <= kmax; ++e) {
                        const double amp = amplitude * symmetric_unit(rng) / (1 + a * a + b * b + e * e);
                        const double phase = pi * symmetric_unit(rng);
                        const Vec3 k = grid_wave_vector(g, {a, b, e});
                        u[c] += ScalarField3::sample(g, [&](const Vec3& x) {
                            return amp * std::sin(k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phase);
                        });
                    }
        return u;
    }
    for (std::size_t c = 0; c < 3; ++c)
        for (int a = 1; a <= kmax; ++a)
            for (int b = 1; b <= kmax; ++b)
                for (int e = 1; e <= kmax; ++e) {
                    const double amp = amplitude * symmetric_unit(rng) / (a * a + b * b + e * e);
                    const std::array<int, 3> modes{a, b, e};
                    u[c] += ScalarField3::sample(g, [&](const Vec3& x) {
                        double s = amp;
                        for (std::size_t ax = 0; ax < 3; ++ax)
                            s *= std::sin(modes[ax] * pi * (x[ax] - g.origin()[ax]) / g.extent(ax));
                        return s;
                    });
                }
    return u;
}

} // namespace lamekit
