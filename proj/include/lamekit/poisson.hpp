#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>

#include "lamekit/fft.hpp"
#include "lamekit/operators.hpp"

namespace lamekit {

struct PoissonOptions {
    /// Periodic solvability: |mean(theta)| <= solvability_tol * max(rms(theta), reference_scale).
    double solvability_tol = 1e-10;
    /// Caller-supplied magnitude (e.g. max|u|/d when theta = div u) so that
    /// round-off in a nearly-zero source is not mistaken for a nonzero mean.
    double reference_scale = 0.0;
    /// Dirichlet backend: relative residual target and iteration cap.
    double rel_tol = 1e-8;
    int max_iterations = 20000;
};

struct PoissonStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

namespace detail {

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

/// y = -L x on interior points (compact stencil); boundary entries of x are
/// taken as given and y is zero on the boundary.
template <std::size_t Dim>
void neg_laplacian_interior(const Grid<Dim>& g, const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t a = 0; a < Dim; ++a) {
        const double invd2 = 1.0 / (g.d(a) * g.d(a));
        const int n = g.n(a);
        for_each_line(g, a, [&](std::size_t base, std::size_t s) {
            for (int i = 1; i < n - 1; ++i) {
                const std::size_t p = base + i * s;
                y[p] -= (x[p + s] - 2.0 * x[p] + x[p - s]) * invd2;
            }
        });
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.on_boundary(g.multi(i))) y[i] = 0.0;
}

} // namespace detail

/// Solves laplacian(w) = rhs at interior points of a Dirichlet grid with w fixed
/// to `boundary` on the boundary (interior entries of `boundary` are ignored).
/// Conjugate gradients on the compact stencil.
template <std::size_t Dim>
ScalarField<Dim> solve_dirichlet(const ScalarField<Dim>& rhs, const ScalarField<Dim>& boundary,
                                 const PoissonOptions& opt = {}, PoissonStats* stats = nullptr) {
    const auto& g = rhs.grid();
    rhs.check_same_grid(boundary);
    if (g.periodic()) throw InputError("solve_dirichlet requires a Dirichlet grid");
    require_finite(rhs, "Poisson source");
    require_finite(boundary, "Poisson boundary data");

    const std::size_t N = g.size();
    std::vector<bool> interior(N);
    for (std::size_t i = 0; i < N; ++i) interior[i] = !g.on_boundary(g.multi(i));

    std::vector<double> w0(N, 0.0);
    for (std::size_t i = 0; i < N; ++i)
        if (!interior[i]) w0[i] = boundary[i];

    // -L e = b with b = -(rhs - L w0) on the interior, e = 0 on the boundary.
    std::vector<double> Aw0(N);
    detail::neg_laplacian_interior(g, w0, Aw0);
    std::vector<double> b(N, 0.0);
    for (std::size_t i = 0; i < N; ++i)
        if (interior[i]) b[i] = -rhs[i] - Aw0[i];

    auto dot = [&](const std::vector<double>& p, const std::vector<double>& q) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) s += p[i] * q[i];
        return s;
    };

    std::vector<double> e(N, 0.0), r = b, p = b, Ap(N);
    const double bnorm = std::sqrt(dot(b, b));
    double rr = dot(r, r);
    int it = 0;
    double rel = bnorm > 0.0 ? std::sqrt(rr) / bnorm : 0.0;
    while (bnorm > 0.0 && rel > opt.rel_tol) {
        if (it >= opt.max_iterations)
            throw NumericalError("Dirichlet Poisson solve did not converge after " + std::to_string(it) +
                                 " iterations (relative residual " + detail::fmt_double(rel) + ")");
        detail::neg_laplacian_interior(g, p, Ap);
        const double alpha = rr / dot(p, Ap);
        for (std::size_t i = 0; i < N; ++i) {
            e[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rr_new = dot(r, r);
        for (std::size_t i = 0; i < N; ++i) p[i] = r[i] + (rr_new / rr) * p[i];
        rr = rr_new;
        rel = std::sqrt(rr) / bnorm;
        ++it;
    }
    if (stats) *stats = {it, rel};

    ScalarField<Dim> w(g);
    for (std::size_t i = 0; i < N; ++i) w[i] = w0[i] + e[i];
    return w;
}

/// Spectral solve of div_grad(w) = theta on a periodic grid, using the exact
/// symbol of the composed central-difference operator,
///   -sum_a sin^2(2 pi k_a / n_a) / d_a^2.
/// Modes where the symbol vanishes (the mean and, for even n, the Nyquist
/// combinations) are set to zero, which fixes the zero-mean gauge.
template <std::size_t Dim>
ScalarField<Dim> solve_poisson_periodic(const ScalarField<Dim>& theta, const PoissonOptions& opt = {}) {
    const auto& g = theta.grid();
    require_finite(theta, "Poisson source");

    const Norms nrm = field_norms(theta);
    const double scale = std::max(nrm.rms, opt.reference_scale);
    const double m = mean(theta);
    if (std::abs(m) > opt.solvability_tol * scale)
        throw NumericalError("periodic Poisson problem is not solvable: mean(theta) = " + detail::fmt_double(m) +
                             " exceeds " + detail::fmt_double(opt.solvability_tol) + " * scale " +
                             detail::fmt_double(scale));

    fft::RealTransform<Dim> tr(g.n());
    std::copy(theta.values().begin(), theta.values().end(), tr.real().begin());
    tr.forward();

    const double total = static_cast<double>(g.size());
    auto& spec = tr.spectrum();
    tr.for_each_mode([&](std::size_t s, const std::array<int, Dim>& k) {
        double symbol = 0.0;
        for (std::size_t a = 0; a < Dim; ++a) {
            const double sn = std::sin(2.0 * std::numbers::pi * k[a] / g.n(a)) / g.d(a);
            symbol -= sn * sn;
        }
        // sin(pi) is ~1e-16, not zero: detect the kernel from the indices.
        bool null_mode = true;
        for (std::size_t a = 0; a < Dim; ++a)
            if (k[a] != 0 && 2 * k[a] != g.n(a)) null_mode = false;
        if (null_mode) {
            const double amp = std::abs(spec[s]) / total;
            if (amp > opt.solvability_tol * scale && !(k == std::array<int, Dim>{}))
                throw NumericalError("periodic Poisson problem is not solvable: source has amplitude " +
                                     detail::fmt_double(amp) + " on an alternating (kernel) mode");
            spec[s] = 0.0;
        } else {
            spec[s] /= symbol * total;
        }
    });
    tr.backward();
    return ScalarField<Dim>(g, std::vector<double>(tr.real().begin(), tr.real().end()));
}

/// Component of f in the kernel of the discrete Laplacian. Periodic grids keep
/// the modes where the div-grad symbol vanishes (the mean and the Nyquist
/// combinations); Dirichlet grids return the compact-stencil harmonic extension
/// of f's boundary values.
template <std::size_t Dim>
ScalarField<Dim> harmonic_projection(const ScalarField<Dim>& f, const PoissonOptions& opt = {}) {
    const auto& g = f.grid();
    if (!g.periodic()) return solve_dirichlet(ScalarField<Dim>(g), f, opt);
    require_finite(f, "harmonic projection input");
    fft::RealTransform<Dim> tr(g.n());
    std::copy(f.values().begin(), f.values().end(), tr.real().begin());
    tr.forward();
    const double total = static_cast<double>(g.size());
    auto& spec = tr.spectrum();
    tr.for_each_mode([&](std::size_t s, const std::array<int, Dim>& k) {
        bool null_mode = true;
        for (std::size_t a = 0; a < Dim; ++a)
            if (k[a] != 0 && 2 * k[a] != g.n(a)) null_mode = false;
        spec[s] = null_mode ? spec[s] / total : 0.0;
    });
    tr.backward();
    return ScalarField<Dim>(g, std::vector<double>(tr.real().begin(), tr.real().end()));
}

/// Dispatches on the grid's boundary kind. Dirichlet grids get w = 0 on the boundary
/// and solve with the compact stencil.
template <std::size_t Dim>
ScalarField<Dim> solve_poisson(const ScalarField<Dim>& theta, const PoissonOptions& opt = {},
                               PoissonStats* stats = nullptr) {
    if (theta.grid().periodic()) {
        if (stats) *stats = {};
        return solve_poisson_periodic(theta, opt);
    }
    return solve_dirichlet(theta, ScalarField<Dim>(theta.grid()), opt, stats);
}

} // namespace lamekit
