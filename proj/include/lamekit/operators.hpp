#pragma once

#include <cstddef>

#include "lamekit/field.hpp"

// Second-order finite-difference operators on collocated grids.
//
// Interior points use central differences. Periodic grids wrap; Dirichlet grids
// switch to one-sided second-order formulas on the first and last point of each
// axis. `laplacian` is the compact (2*Dim+1)-point stencil. `div_grad` is the
// composition divergence(gradient(.)), i.e. the wide stencil with step 2d, and is
// the operator the spectral Poisson solver inverts.

namespace lamekit {

/// First derivative along one axis.
template <std::size_t Dim>
ScalarField<Dim> diff1(const ScalarField<Dim>& f, std::size_t axis) {
    const auto& g = f.grid();
    ScalarField<Dim> out(g);
    const int n = g.n(axis);
    const double inv2d = 1.0 / (2.0 * g.d(axis));
    const bool periodic = g.periodic();
    for_each_line(g, axis, [&](std::size_t base, std::size_t s) {
        auto v = [&](int i) { return f[base + static_cast<std::size_t>(i) * s]; };
        auto& o = out;
        for (int i = 1; i < n - 1; ++i) o[base + i * s] = (v(i + 1) - v(i - 1)) * inv2d;
        if (periodic) {
            o[base] = (v(1) - v(n - 1)) * inv2d;
            o[base + (n - 1) * s] = (v(0) - v(n - 2)) * inv2d;
        } else {
            o[base] = (-3.0 * v(0) + 4.0 * v(1) - v(2)) * inv2d;
            o[base + (n - 1) * s] = (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) * inv2d;
        }
    });
    return out;
}

/// Compact second derivative along one axis.
template <std::size_t Dim>
ScalarField<Dim> diff2(const ScalarField<Dim>& f, std::size_t axis) {
    const auto& g = f.grid();
    ScalarField<Dim> out(g);
    const int n = g.n(axis);
    const double invd2 = 1.0 / (g.d(axis) * g.d(axis));
    const bool periodic = g.periodic();
    for_each_line(g, axis, [&](std::size_t base, std::size_t s) {
        auto v = [&](int i) { return f[base + static_cast<std::size_t>(i) * s]; };
        auto& o = out;
        for (int i = 1; i < n - 1; ++i) o[base + i * s] = (v(i + 1) - 2.0 * v(i) + v(i - 1)) * invd2;
        if (periodic) {
            o[base] = (v(1) - 2.0 * v(0) + v(n - 1)) * invd2;
            o[base + (n - 1) * s] = (v(0) - 2.0 * v(n - 1) + v(n - 2)) * invd2;
        } else {
            o[base] = (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) * invd2;
            o[base + (n - 1) * s] = (2.0 * v(n - 1) - 5.0 * v(n - 2) + 4.0 * v(n - 3) - v(n - 4)) * invd2;
        }
    });
    return out;
}

template <std::size_t Dim>
VectorField<Dim> gradient(const ScalarField<Dim>& f) {
    require_finite(f, "gradient input");
    VectorField<Dim> out(f.grid());
    for (std::size_t a = 0; a < Dim; ++a) out[a] = diff1(f, a);
    return out;
}

/// Divergence of the first Dim components (in-plane divergence when Comp > Dim).
template <std::size_t Dim, std::size_t Comp>
ScalarField<Dim> divergence(const VectorField<Dim, Comp>& v) {
    static_assert(Comp >= Dim);
    require_finite(v, "divergence input");
    ScalarField<Dim> out = diff1(v[0], 0);
    for (std::size_t a = 1; a < Dim; ++a) out += diff1(v[a], a);
    return out;
}

template <std::size_t Dim>
ScalarField<Dim> laplacian(const ScalarField<Dim>& f) {
    require_finite(f, "laplacian input");
    ScalarField<Dim> out = diff2(f, 0);
    for (std::size_t a = 1; a < Dim; ++a) out += diff2(f, a);
    return out;
}

template <std::size_t Dim, std::size_t Comp>
VectorField<Dim, Comp> laplacian(const VectorField<Dim, Comp>& v) {
    VectorField<Dim, Comp> out(v.grid());
    for (std::size_t c = 0; c < Comp; ++c) out[c] = laplacian(v[c]);
    return out;
}

/// divergence(gradient(f)), evaluated by composition.
template <std::size_t Dim>
ScalarField<Dim> div_grad(const ScalarField<Dim>& f) {
    return divergence(gradient(f));
}

template <std::size_t Dim, std::size_t Comp>
VectorField<Dim, Comp> div_grad(const VectorField<Dim, Comp>& v) {
    VectorField<Dim, Comp> out(v.grid());
    for (std::size_t c = 0; c < Comp; ++c) out[c] = div_grad(v[c]);
    return out;
}

inline VectorField3 curl(const VectorField3& v) {
    require_finite(v, "curl input");
    VectorField3 out(v.grid());
    out[0] = diff1(v[2], 1) - diff1(v[1], 2);
    out[1] = diff1(v[0], 2) - diff1(v[2], 0);
    out[2] = diff1(v[1], 0) - diff1(v[0], 1);
    return out;
}

} // namespace lamekit
