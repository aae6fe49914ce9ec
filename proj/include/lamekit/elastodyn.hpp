#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>

#include "lamekit/material.hpp"
#include "lamekit/operators.hpp"
#include "lamekit/trajectory.hpp"

namespace lamekit {

using Vec3 = std::array<double, 3>;

/// Two consecutive time levels of the leapfrog scheme. Initial velocity is
/// carried implicitly by u_prev = u(t - dt).
struct SimState {
    VectorField3 u_curr;
    VectorField3 u_prev;
    double t = 0.0;
    double dt = 0.0;

    SimState(VectorField3 curr, VectorField3 prev, double t_, double dt_)
        : u_curr(std::move(curr)), u_prev(std::move(prev)), t(t_), dt(dt_) {
        if (!(u_curr.grid() == u_prev.grid())) throw InputError("SimState levels must share one grid");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive");
    }
};

/// Acceleration of the Lamé equation: ((lambda+mu) grad div u + mu lap u) / rho.
inline VectorField3 lame_rhs(const VectorField3& u, const Material& m) {
    const VectorField3 gd = gradient(divergence(u));
    VectorField3 out = laplacian(u);
    out *= m.mu() / m.rho();
    out.axpy((m.lambda() + m.mu()) / m.rho(), gd);
    return out;
}

/// Stable leapfrog step bound: safety * min(d) / (c * sqrt(3)). c is the
/// faster of the two wave speeds, which is c_p whenever lambda + mu >= 0.
inline double cfl_max_dt(const Grid3& g, const Material& m, double safety = 0.9) {
    const auto c = wave_speeds(m);
    return safety * g.min_spacing() / (std::max(c.c_p, c.c_s) * std::sqrt(3.0));
}

namespace detail {
inline void hold_dirichlet_boundary(VectorField3& next, const VectorField3& curr) {
    const auto& g = curr.grid();
    if (g.periodic()) return;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.on_boundary(g.multi(i)))
            for (std::size_t c = 0; c < 3; ++c) next[c][i] = curr[c][i];
}

inline void check_cfl(const Grid3& g, const Material& m, double dt) {
    const double limit = cfl_max_dt(g, m);
    if (dt > limit * (1.0 + 1e-12))
        throw NumericalError("time step " + std::to_string(dt) + " exceeds the CFL limit " + std::to_string(limit));
}
} // namespace detail

/// u_next = 2 u - u_prev + dt^2 rhs(u). Dirichlet boundary values stay clamped.
inline SimState step(const SimState& s, const Material& m) {
    detail::check_cfl(s.u_curr.grid(), m, s.dt);
    VectorField3 next = s.u_curr;
    next *= 2.0;
    next -= s.u_prev;
    next.axpy(s.dt * s.dt, lame_rhs(s.u_curr, m));
    detail::hold_dirichlet_boundary(next, s.u_curr);
    return SimState(std::move(next), s.u_curr, s.t + s.dt, s.dt);
}

/// Builds the starting state from displacement and velocity with the
/// second-order Taylor start u_prev = u0 - dt v0 + dt^2/2 rhs(u0).
inline SimState initial_state(const VectorField3& u0, const VectorField3& v0, double dt, const Material& m,
                              double t0 = 0.0) {
    require_finite(u0, "initial displacement");
    require_finite(v0, "initial velocity");
    VectorField3 prev = u0;
    prev.axpy(-dt, v0);
    prev.axpy(0.5 * dt * dt, lame_rhs(u0, m));
    detail::hold_dirichlet_boundary(prev, u0);
    return SimState(u0, std::move(prev), t0, dt);
}

/// Wave vector 2 pi m_a / L_a for integer mode numbers on a periodic grid.
inline Vec3 grid_wave_vector(const Grid3& g, const std::array<int, 3>& modes) {
    Vec3 k{};
    for (std::size_t a = 0; a < 3; ++a) k[a] = 2.0 * std::numbers::pi * modes[a] / g.extent(a);
    return k;
}

namespace detail {
inline double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
inline double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline void check_wave_vector(const Grid3& g, const Vec3& k) {
    const double kn = norm3(k);
    if (!(kn > 0.0) || !std::isfinite(kn)) throw InputError("wave vector must be nonzero and finite");
    if (!g.periodic()) return;
    for (std::size_t a = 0; a < 3; ++a) {
        const double cycles = k[a] * g.extent(a) / (2.0 * std::numbers::pi);
        if (std::abs(cycles - std::round(cycles)) > 1e-9)
            throw InputError("wave vector component " + std::to_string(a + 1) +
                             " is not an integer multiple of 2*pi/L on the periodic grid");
    }
}

template <class Fn>
VectorField3 plane_field(const Grid3& g, const Vec3& dir, double A, Fn&& phase_fn) {
    return VectorField3::sample(g, [&](const Vec3& x) {
        const double s = A * phase_fn(x);
        return Vec3{s * dir[0], s * dir[1], s * dir[2]};
    });
}
} // namespace detail

/// Longitudinal plane wave A (k/|k|) sin(k.x - |k| c_p t).
inline VectorField3 plane_p_wave(const Grid3& g, const Vec3& k, double A, const Material& m, double t) {
    detail::check_wave_vector(g, k);
    const double kn = detail::norm3(k);
    const double omega = kn * wave_speeds(m).c_p;
    const Vec3 dir{k[0] / kn, k[1] / kn, k[2] / kn};
    return detail::plane_field(g, dir, A, [&](const Vec3& x) { return std::sin(detail::dot3(k, x) - omega * t); });
}

/// Time derivative of plane_p_wave.
inline VectorField3 plane_p_wave_velocity(const Grid3& g, const Vec3& k, double A, const Material& m, double t) {
    detail::check_wave_vector(g, k);
    const double kn = detail::norm3(k);
    const double omega = kn * wave_speeds(m).c_p;
    const Vec3 dir{k[0] / kn, k[1] / kn, k[2] / kn};
    return detail::plane_field(g, dir, -A * omega,
                               [&](const Vec3& x) { return std::cos(detail::dot3(k, x) - omega * t); });
}

namespace detail {
inline void check_polarization(const Vec3& k, const Vec3& p) {
    if (std::abs(norm3(p) - 1.0) > 1e-12) throw InputError("S-wave polarization must be a unit vector");
    if (std::abs(dot3(p, k)) > 1e-12 * norm3(k)) throw InputError("S-wave polarization must be orthogonal to k");
}
} // namespace detail

/// Transverse plane wave A p sin(k.x - |k| c_s t) with p orthogonal to k.
inline VectorField3 plane_s_wave(const Grid3& g, const Vec3& k, const Vec3& p, double A, const Material& m,
                                 double t) {
    detail::check_wave_vector(g, k);
    detail::check_polarization(k, p);
    const double omega = detail::norm3(k) * wave_speeds(m).c_s;
    return detail::plane_field(g, p, A, [&](const Vec3& x) { return std::sin(detail::dot3(k, x) - omega * t); });
}

inline VectorField3 plane_s_wave_velocity(const Grid3& g, const Vec3& k, const Vec3& p, double A,
                                          const Material& m, double t) {
    detail::check_wave_vector(g, k);
    detail::check_polarization(k, p);
    const double omega = detail::norm3(k) * wave_speeds(m).c_s;
    return detail::plane_field(g, p, -A * omega,
                               [&](const Vec3& x) { return std::cos(detail::dot3(k, x) - omega * t); });
}

/// Advances n_steps and records the initial level plus every record_every-th
/// level. The optional observer sees every state, recorded or not.
inline VectorTrajectory simulate(const SimState& initial, const Material& m, int n_steps, int record_every = 1,
                                 const std::function<void(const SimState&)>& observer = {}) {
    if (n_steps < 0) throw InputError("n_steps must be non-negative");
    if (record_every < 1) throw InputError("record_every must be at least 1");
    detail::check_cfl(initial.u_curr.grid(), m, initial.dt);
    VectorTrajectory tr(initial.t, initial.dt * record_every);
    tr.push_back(initial.u_curr);
    if (observer) observer(initial);
    SimState s = initial;
    for (int n = 1; n <= n_steps; ++n) {
        s = step(s, m);
        if (observer) observer(s);
        if (n % record_every == 0) tr.push_back(s.u_curr);
    }
    return tr;
}

/// Points on which residuals are evaluated: all points on periodic grids,
/// points off the boundary on Dirichlet grids.
inline int interior_margin(const Grid3& g) { return g.periodic() ? 0 : 1; }

/// A-posteriori residual rho (u_{i+1} - 2 u_i + u_{i-1})/dt^2 - rho rhs(u_i).
inline Norms residual_lame(const VectorTrajectory& tr, const Material& m, std::size_t i) {
    if (tr.size() < 3 || i < 1 || i + 2 > tr.size())
        throw InputError("residual_lame index " + std::to_string(i) + " is not an interior snapshot of a " +
                         std::to_string(tr.size()) + "-snapshot trajectory");
    VectorField3 r = second_time_difference(tr, i);
    r -= lame_rhs(tr[i], m);
    r *= m.rho();
    return field_norms(r, interior_margin(tr.grid()));
}

struct Energy {
    double kinetic = 0.0;
    double elastic = 0.0;
    double total() const { return kinetic + elastic; }
};

namespace detail {
/// Sum over the grid of forward differences along `axis` of a and b, multiplied
/// pointwise; periodic wrap.
inline double forward_difference_product(const ScalarField3& a, const ScalarField3& b, std::size_t axis) {
    const auto& g = a.grid();
    const int n = g.n(axis);
    const double inv = 1.0 / g.d(axis);
    double sum = 0.0;
    for_each_line(g, axis, [&](std::size_t base, std::size_t s) {
        for (int i = 0; i < n; ++i) {
            const std::size_t here = base + i * s, next = base + ((i + 1) % n) * s;
            sum += (a[next] - a[here]) * inv * (b[next] - b[here]) * inv;
        }
    });
    return sum;
}
} // namespace detail

/// Discrete energy at the half level between u_prev and u_curr. Kinetic is
/// 1/2 rho |(u_curr - u_prev)/dt|^2. Elastic is 1/2 S(eps(u_prev)) : eps(u_curr);
/// on periodic grids it is assembled in the integrated-by-parts form
/// 1/2 (lambda + mu) div u_prev div u_curr + 1/2 mu grad u_prev : grad u_curr,
/// with the divergence and gradient the stepper uses, which the leapfrog scheme
/// conserves exactly. Both are summed with the cell volume.
inline Energy discrete_energy(const VectorField3& u_prev, const VectorField3& u_curr, double dt,
                              const Material& m) {
    const auto& g = u_curr.grid();
    const double dv = g.cell_volume();
    Energy e;
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double vel = (u_curr[c][i] - u_prev[c][i]) / dt;
            e.kinetic += 0.5 * m.rho() * vel * vel * dv;
        }
    if (g.periodic()) {
        const ScalarField3 dp = divergence(u_prev), dc = divergence(u_curr);
        for (std::size_t i = 0; i < g.size(); ++i) e.elastic += 0.5 * (m.lambda() + m.mu()) * dp[i] * dc[i] * dv;
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t a = 0; a < 3; ++a)
                e.elastic += 0.5 * m.mu() * detail::forward_difference_product(u_prev[c], u_curr[c], a) * dv;
        return e;
    }
    const SymTensorField s = stress(strain(u_prev), m);
    const SymTensorField eps = strain(u_curr);
    for (std::size_t slot = 0; slot < 6; ++slot) {
        const double w = slot < 3 ? 1.0 : 2.0;
        const auto& sf = s.slot_field(slot);
        const auto& ef = eps.slot_field(slot);
        for (std::size_t i = 0; i < g.size(); ++i) e.elastic += 0.5 * w * sf[i] * ef[i] * dv;
    }
    return e;
}

inline Energy discrete_energy(const SimState& s, const Material& m) {
    return discrete_energy(s.u_prev, s.u_curr, s.dt, m);
}

} // namespace lamekit
