#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lamekit/fft.hpp"
#include "lamekit/material.hpp"
#include "lamekit/poisson.hpp"

// Plate models on rectangles.
//
// Modified system: the through-thickness ansatz
//   w_hat ~ w0(x1,x2) + x3 w1(t,x1,x2),   v ~ v0 + x3 v1,
// with w0 harmonic and static, w1 a P-speed membrane wave, and v0, v1 the
// rotated gradients of stream functions V0, V1 that carry S-speed waves.
//
// Kirchhoff-Love: -G_tt + (h^2/12) lap G_tt - (h^2/12) E/(rho (1-sigma^2)) lap lap G = 0,
// evolved in the sine basis of a simply supported rectangle.

namespace lamekit {

struct PlateConfig {
    Grid2 grid;
    double thickness;
    Material material;

    PlateConfig(Grid2 g, double h, Material m) : grid(std::move(g)), thickness(h), material(m) {
        if (!(thickness > 0.0) || !std::isfinite(thickness)) throw InputError("plate thickness must be positive");
    }

    /// Thickness over the smaller in-plane extent.
    double aspect() const { return thickness / std::min(grid.extent(0), grid.extent(1)); }

    std::optional<std::string> thickness_warning() const {
        if (aspect() > 0.2)
            return "plate thickness " + std::to_string(thickness) + " exceeds 0.2 of the smallest plate extent";
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// 2D membrane waves (w1, V0, V1)

struct Wave2State {
    ScalarField2 curr;
    ScalarField2 prev;
    double t = 0.0;
    double dt = 0.0;
};

inline double wave2_max_dt(const Grid2& g, double speed, double safety = 0.9) {
    return safety * g.min_spacing() / (speed * std::sqrt(2.0));
}

/// Second-order start from displacement and velocity.
inline Wave2State wave2_initial(const ScalarField2& u0, const ScalarField2& v0, double dt, double speed,
                                double t0 = 0.0) {
    require_finite(u0, "initial field");
    require_finite(v0, "initial velocity");
    ScalarField2 prev = u0;
    prev.axpy(-dt, v0);
    prev.axpy(0.5 * dt * dt * speed * speed, laplacian(u0));
    const auto& g = u0.grid();
    if (!g.periodic())
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.on_boundary(g.multi(i))) prev[i] = u0[i];
    return {u0, std::move(prev), t0, dt};
}

/// Leapfrog step of f_tt = speed^2 lap f; Dirichlet edges stay fixed.
inline Wave2State step_wave2(const Wave2State& s, double speed) {
    const auto& g = s.curr.grid();
    const double limit = wave2_max_dt(g, speed);
    if (s.dt > limit * (1.0 + 1e-12))
        throw NumericalError("plate time step " + std::to_string(s.dt) + " exceeds the CFL limit " +
                             std::to_string(limit));
    ScalarField2 next = s.curr;
    next *= 2.0;
    next -= s.prev;
    next.axpy(s.dt * s.dt * speed * speed, laplacian(s.curr));
    if (!g.periodic())
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.on_boundary(g.multi(i))) next[i] = s.curr[i];
    return {std::move(next), s.curr, s.t + s.dt, s.dt};
}

inline double plate_p_speed(const PlateConfig& cfg) { return wave_speeds(cfg.material).c_p; }
inline double plate_s_speed(const PlateConfig& cfg) { return wave_speeds(cfg.material).c_s; }

/// Through-thickness potential w1: membrane wave at the P speed.
inline Wave2State step_w1(const Wave2State& s, const PlateConfig& cfg) { return step_wave2(s, plate_p_speed(cfg)); }

/// Stream functions V0 and V1 share one equation at the S speed.
inline Wave2State step_V(const Wave2State& s, const PlateConfig& cfg) { return step_wave2(s, plate_s_speed(cfg)); }

/// Energy conserved by the leapfrog scheme:
/// 1/2 |(f_curr - f_prev)/dt|^2 + 1/2 speed^2 <D+ f_prev, D+ f_curr>, summed with the cell area.
inline double wave2_energy(const ScalarField2& prev, const ScalarField2& curr, double dt, double speed) {
    const auto& g = curr.grid();
    double kin = 0.0, pot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = (curr[i] - prev[i]) / dt;
        kin += 0.5 * v * v;
    }
    for (std::size_t a = 0; a < 2; ++a) {
        const int n = g.n(a);
        const double invd = 1.0 / g.d(a);
        for_each_line(g, a, [&](std::size_t base, std::size_t s) {
            const int edges = g.periodic() ? n : n - 1;
            for (int i = 0; i < edges; ++i) {
                const std::size_t p = base + i * s;
                const std::size_t q = base + ((i + 1) % n) * s;
                pot += 0.5 * speed * speed * ((prev[q] - prev[p]) * invd) * ((curr[q] - curr[p]) * invd);
            }
        });
    }
    return (kin + pot) * g.cell_volume();
}

inline double wave2_energy(const Wave2State& s, double speed) { return wave2_energy(s.prev, s.curr, s.dt, speed); }

/// Harmonic static potential w0 with the given boundary values (interior entries ignored).
inline ScalarField2 solve_w0(const ScalarField2& boundary_values, const PoissonOptions& opt = {},
                             PoissonStats* stats = nullptr) {
    return solve_dirichlet(ScalarField2(boundary_values.grid()), boundary_values, opt, stats);
}

/// In-plane rotated gradient (dV/dx2, -dV/dx1, 0).
inline PlaneVectorField stream_velocity(const ScalarField2& V) {
    require_finite(V, "stream function");
    PlaneVectorField out(V.grid());
    out[0] = diff1(V, 1);
    out[1] = diff1(V, 0);
    out[1] *= -1.0;
    return out;
}

/// The four potentials of the modified plate system at one time level.
struct PlateState {
    ScalarField2 w0;
    Wave2State w1;
    Wave2State V0;
    Wave2State V1;
};

/// Displacement at height x3 from the mid-plane:
///   u = v0 + x3 v1 + (d1 w0 + x3 d1 w1, d2 w0 + x3 d2 w1, w1).
inline PlaneVectorField assemble_displacement(const PlateState& p, const PlateConfig& cfg, double x3) {
    if (!(std::abs(x3) <= 0.5 * cfg.thickness))
        throw InputError("offset x3 = " + std::to_string(x3) + " lies outside the plate (|x3| <= " +
                         std::to_string(0.5 * cfg.thickness) + ")");
    const ScalarField2& w1 = p.w1.curr;
    PlaneVectorField u = stream_velocity(p.V0.curr);
    u.axpy(x3, stream_velocity(p.V1.curr));
    for (std::size_t a = 0; a < 2; ++a) {
        u[a] += diff1(p.w0, a);
        u[a].axpy(x3, diff1(w1, a));
    }
    u[2] += w1;
    return u;
}

// ---------------------------------------------------------------------------
// Kirchhoff-Love

/// Bending coefficient (h^2/12) E / (rho (1 - sigma^2)).
inline double kl_bending_coefficient(const PlateConfig& cfg) {
    const Material& m = cfg.material;
    const double s = m.poisson();
    return cfg.thickness * cfg.thickness / 12.0 * m.young() / (m.rho() * (1.0 - s * s));
}

/// Angular frequency of the simply supported (m, n) mode on an a x b plate,
/// from substituting sin(m pi x1/a) sin(n pi x2/b) exp(i omega t) into the
/// Kirchhoff-Love equation with rotary inertia.
inline double kl_modal_frequency(int m, int n, double a, double b, const PlateConfig& cfg) {
    if (m < 1 || n < 1) throw InputError("mode indices must be at least 1");
    if (!(a > 0.0) || !(b > 0.0)) throw InputError("plate dimensions must be positive");
    const double km = m * std::numbers::pi / a, kn = n * std::numbers::pi / b;
    const double k2 = km * km + kn * kn;
    const double h2 = cfg.thickness * cfg.thickness;
    return std::sqrt(kl_bending_coefficient(cfg) * k2 * k2 / (1.0 + h2 * k2 / 12.0));
}

/// Classical thin-plate frequency without rotary inertia.
inline double kl_thin_plate_frequency(int m, int n, double a, double b, const PlateConfig& cfg) {
    const double km = m * std::numbers::pi / a, kn = n * std::numbers::pi / b;
    return std::sqrt(kl_bending_coefficient(cfg)) * (km * km + kn * kn);
}

/// Kirchhoff-Love dispersion relation omega(k).
inline double kl_dispersion(double k, const PlateConfig& cfg) {
    const double k2 = k * k;
    return std::sqrt(kl_bending_coefficient(cfg) * k2 * k2 / (1.0 + cfg.thickness * cfg.thickness * k2 / 12.0));
}

/// Wavenumber where the Kirchhoff-Love curve meets omega = c k, if it does.
inline std::optional<double> kl_crossover(double c, const PlateConfig& cfg) {
    // D' k^2 = c^2 (1 + h^2 k^2 / 12)
    const double h2 = cfg.thickness * cfg.thickness;
    const double denom = kl_bending_coefficient(cfg) - c * c * h2 / 12.0;
    if (!(denom > 0.0)) return std::nullopt;
    return std::sqrt(c * c / denom);
}

struct KLState {
    ScalarField2 curr;
    ScalarField2 prev;
    double t = 0.0;
    double dt = 0.0;
};

namespace detail {
inline void require_simply_supported(const Grid2& g) {
    if (g.periodic()) throw InputError("Kirchhoff-Love evolution needs a Dirichlet (simply supported) rectangle");
}

inline double sine_wavenumber_sq(const Grid2& g, int p, int q) {
    const double kp = p * std::numbers::pi / g.extent(0), kq = q * std::numbers::pi / g.extent(1);
    return kp * kp + kq * kq;
}

/// Interior values to sine coefficients (unnormalized forward DST-I).
inline std::vector<double> sine_coefficients(const ScalarField2& f) {
    const auto& g = f.grid();
    const int m0 = g.n(0) - 2, m1 = g.n(1) - 2;
    fft::SineTransform<2> st({m0, m1});
    for (int j = 0; j < m1; ++j)
        for (int i = 0; i < m0; ++i) st.data()[j * m0 + i] = f.at({i + 1, j + 1});
    st.execute();
    return st.data();
}

inline ScalarField2 from_sine_coefficients(const Grid2& g, const std::vector<double>& c) {
    const int m0 = g.n(0) - 2, m1 = g.n(1) - 2;
    fft::SineTransform<2> st({m0, m1});
    st.data() = c;
    st.execute();
    ScalarField2 f(g);
    const double norm = st.normalization();
    for (int j = 0; j < m1; ++j)
        for (int i = 0; i < m0; ++i) f.at({i + 1, j + 1}) = st.data()[j * m0 + i] / norm;
    return f;
}
} // namespace detail

/// G_tt from the Kirchhoff-Love equation, with every spatial operator applied
/// as a sine-basis multiplier: lap -> -k^2, and (1 - h^2/12 lap) inverted modewise.
inline ScalarField2 kl_acceleration(const ScalarField2& G, const PlateConfig& cfg) {
    const auto& g = G.grid();
    detail::require_simply_supported(g);
    const int m0 = g.n(0) - 2, m1 = g.n(1) - 2;
    const double h2_12 = cfg.thickness * cfg.thickness / 12.0;
    const double stiffness = kl_bending_coefficient(cfg);
    std::vector<double> c = detail::sine_coefficients(G);
    for (int q = 1; q <= m1; ++q)
        for (int p = 1; p <= m0; ++p) {
            const double lap = -detail::sine_wavenumber_sq(g, p, q);
            const double biharmonic = lap * lap;
            const double inertia = 1.0 - h2_12 * lap;
            double& cv = c[(q - 1) * m0 + (p - 1)];
            cv = -stiffness * biharmonic * cv / inertia;
        }
    return detail::from_sine_coefficients(g, c);
}

/// Leapfrog limit set by the highest retained sine mode.
inline double kl_max_dt(const PlateConfig& cfg, double safety = 0.9) {
    const auto& g = cfg.grid;
    detail::require_simply_supported(g);
    const double k2 = detail::sine_wavenumber_sq(g, g.n(0) - 2, g.n(1) - 2);
    const double h2_12 = cfg.thickness * cfg.thickness / 12.0;
    const double omega_max = std::sqrt(kl_bending_coefficient(cfg) * k2 * k2 / (1.0 + h2_12 * k2));
    return 2.0 * safety / omega_max;
}

inline KLState kl_initial(const ScalarField2& G0, const ScalarField2& G0_t, double dt, const PlateConfig& cfg,
                          double t0 = 0.0) {
    require_finite(G0, "initial deflection");
    require_finite(G0_t, "initial deflection rate");
    ScalarField2 prev = G0;
    prev.axpy(-dt, G0_t);
    prev.axpy(0.5 * dt * dt, kl_acceleration(G0, cfg));
    return {G0, std::move(prev), t0, dt};
}

inline KLState kl_step(const KLState& s, const PlateConfig& cfg) {
    const double limit = kl_max_dt(cfg);
    if (s.dt > limit * (1.0 + 1e-12))
        throw NumericalError("Kirchhoff-Love time step " + std::to_string(s.dt) +
                             " exceeds the limit of the highest mode " + std::to_string(limit));
    ScalarField2 next = s.curr;
    next *= 2.0;
    next -= s.prev;
    next.axpy(s.dt * s.dt, kl_acceleration(s.curr, cfg));
    return {std::move(next), s.curr, s.t + s.dt, s.dt};
}

/// Modal energy sum 1/2 (1 + h^2 k^2/12) |dG/dt|^2 + 1/2 D' k^4 G_prev G_curr,
/// in units of the plate area.
inline double kl_energy(const KLState& s, const PlateConfig& cfg) {
    const auto& g = s.curr.grid();
    const int m0 = g.n(0) - 2, m1 = g.n(1) - 2;
    const auto cc = detail::sine_coefficients(s.curr);
    const auto cp = detail::sine_coefficients(s.prev);
    const double h2_12 = cfg.thickness * cfg.thickness / 12.0;
    const double stiffness = kl_bending_coefficient(cfg);
    // DST-I coefficient c relates to the sine amplitude A by c = A (N+1) per axis.
    const double scale = 1.0 / ((m0 + 1.0) * (m1 + 1.0));
    double e = 0.0;
    for (int q = 1; q <= m1; ++q)
        for (int p = 1; p <= m0; ++p) {
            const std::size_t idx = (q - 1) * m0 + (p - 1);
            const double k2 = detail::sine_wavenumber_sq(g, p, q);
            const double ac = cc[idx] * scale, ap = cp[idx] * scale;
            const double vel = (ac - ap) / s.dt;
            e += 0.5 * (1.0 + h2_12 * k2) * vel * vel + 0.5 * stiffness * k2 * k2 * ac * ap;
        }
    // mean of sin^2 sin^2 over the rectangle is 1/4
    return 0.25 * e * g.extent(0) * g.extent(1);
}

// ---------------------------------------------------------------------------
// Frequency tables

struct FrequencyRow {
    int m;
    int n;
    double k;
    double omega_kl;
    double omega_w1;
    double omega_V;
    /// omega_w1 / omega_V
    double ratio;
};

inline std::vector<FrequencyRow> frequency_table(const std::vector<std::array<int, 2>>& modes, double a, double b,
                                                 const PlateConfig& cfg) {
    const auto c = wave_speeds(cfg.material);
    std::vector<FrequencyRow> rows;
    for (const auto& [m, n] : modes) {
        const double om = kl_modal_frequency(m, n, a, b, cfg);
        const double km = m * std::numbers::pi / a, kn = n * std::numbers::pi / b;
        const double k = std::sqrt(km * km + kn * kn);
        rows.push_back({m, n, k, om, c.c_p * k, c.c_s * k, c.c_p / c.c_s});
    }
    return rows;
}

} // namespace lamekit
