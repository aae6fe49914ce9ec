#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "lamekit/elastodyn.hpp"
#include "lamekit/poisson.hpp"

// Splits a displacement trajectory u into a gradient part grad(w_hat) and a
// divergence-free part v:
//
//   theta = div u
//   div grad w = theta          (per snapshot, zero-mean gauge on periodic grids)
//   h = w_tt - c_p^2 theta      (space-harmonic defect)
//   H = double time integral of h, H(t0) = H_t(t0) = 0
//   w_hat = w - H,  v = u - grad w_hat
//
// On the grid, h is harmonic only up to truncation error. Only its component in
// the kernel of the discrete Laplacian is integrated into H; integrating the
// remainder would leak truncation error into div v. The remainder is what the
// harmonic residual |lap h| measures.
//
// w_hat then solves the P-wave equation and v the S-wave equation, up to
// discretization error. The split is unique only modulo space-harmonic
// functions; gauge_shift moves along that freedom.

namespace lamekit {

struct DecomposeOptions {
    PoissonOptions poisson;
    /// Points used for the diagnostic norms: -1 picks 0 on periodic grids and
    /// 1 on Dirichlet grids.
    int margin = -1;
};

struct DiagnosticsRow {
    double t = 0.0;
    double div_v_rms = 0.0;
    double wave_res_scalar = 0.0;
    double wave_res_vector = 0.0;
    double harmonic_res = 0.0;
    double recon_err = 0.0;
    /// First and last snapshots use one-sided time differences.
    bool endpoint = false;
};

struct Decomposition {
    ScalarTrajectory<3> w_hat;
    VectorTrajectory v;
    std::vector<DiagnosticsRow> diagnostics;
    int margin = 0;
    /// Scales for relative comparisons: max |u| over the trajectory, max rms(div u).
    double u_max = 0.0;
    double div_u_rms = 0.0;
};

/// Per-snapshot divergence.
inline ScalarTrajectory<3> compute_theta(const VectorTrajectory& u) {
    u.require_at_least(1, "compute_theta");
    ScalarTrajectory<3> theta(u.t0(), u.dt());
    for (const auto& snap : u) theta.push_back(divergence(snap));
    return theta;
}

/// h_i = w_tt(i) - ((lambda + 2 mu)/rho) theta_i, using div grad w = theta.
inline ScalarTrajectory<3> harmonic_defect(const ScalarTrajectory<3>& w, const ScalarTrajectory<3>& theta,
                                           const Material& m) {
    w.require_at_least(3, "harmonic_defect");
    if (w.size() != theta.size() || w.dt() != theta.dt())
        throw InputError("harmonic_defect: w and theta trajectories differ in length or time step");
    const double cp2 = (m.lambda() + 2.0 * m.mu()) / m.rho();
    ScalarTrajectory<3> h(w.t0(), w.dt());
    for (std::size_t i = 0; i < w.size(); ++i) {
        ScalarField3 hi = second_time_difference(w, i);
        hi.axpy(-cp2, theta[i]);
        h.push_back(std::move(hi));
    }
    return h;
}

/// Iterated cumulative trapezoid: H(t0) = 0, dH/dt(t0) = 0, H_tt = h.
template <std::size_t Dim>
ScalarTrajectory<Dim> double_time_integral(const ScalarTrajectory<Dim>& h) {
    h.require_at_least(1, "double_time_integral");
    const double half_dt = 0.5 * h.dt();
    ScalarTrajectory<Dim> H(h.t0(), h.dt());
    ScalarField<Dim> inner(h.grid());
    ScalarField<Dim> outer(h.grid());
    H.push_back(outer);
    for (std::size_t i = 1; i < h.size(); ++i) {
        ScalarField<Dim> next_inner = inner;
        next_inner.axpy(half_dt, h[i - 1]);
        next_inner.axpy(half_dt, h[i]);
        outer.axpy(half_dt, inner);
        outer.axpy(half_dt, next_inner);
        inner = std::move(next_inner);
        H.push_back(outer);
    }
    return H;
}

/// Diagnostics for a candidate split (v, w_hat) of u. harmonic_res is left at zero.
/// Residuals use div_grad, the Laplacian the Poisson solve inverts. Against the
/// compact stencil the vector residual of a leapfrog trajectory on a periodic
/// grid vanishes identically, which would hide its convergence behavior.
inline std::vector<DiagnosticsRow> split_diagnostics(const VectorTrajectory& u, const ScalarTrajectory<3>& w_hat,
                                                     const VectorTrajectory& v, const Material& m, int margin) {
    const auto c = wave_speeds(m);
    const double cp2 = c.c_p * c.c_p, cs2 = c.c_s * c.c_s;
    std::vector<DiagnosticsRow> rows;
    const bool can_difference = u.size() >= 3;
    for (std::size_t i = 0; i < u.size(); ++i) {
        DiagnosticsRow r;
        r.t = u.time(i);
        r.endpoint = i == 0 || i + 1 == u.size();
        r.div_v_rms = field_norms(divergence(v[i]), margin).rms;
        VectorField3 recon = u[i] - v[i];
        recon -= gradient(w_hat[i]);
        r.recon_err = field_norms(recon, margin).max_abs;
        if (can_difference) {
            ScalarField3 rs = second_time_difference(w_hat, i);
            rs.axpy(-cp2, div_grad(w_hat[i]));
            r.wave_res_scalar = field_norms(rs, margin).rms;
            VectorField3 rv = second_time_difference(v, i);
            rv.axpy(-cs2, div_grad(v[i]));
            r.wave_res_vector = field_norms(rv, margin).rms;
        }
        rows.push_back(r);
    }
    return rows;
}

namespace detail {
template <class Fn>
auto with_stage(const std::string& stage, std::size_t snapshot, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const NumericalError& e) {
        throw NumericalError("decompose[" + stage + " @ snapshot " + std::to_string(snapshot) + "]: " + e.what());
    } catch (const InputError& e) {
        throw InputError("decompose[" + stage + " @ snapshot " + std::to_string(snapshot) + "]: " + e.what());
    }
}
} // namespace detail

inline Decomposition decompose(const VectorTrajectory& u, const Material& m, const DecomposeOptions& opt = {}) {
    u.require_at_least(3, "decompose");
    const Grid3& g = u.grid();
    const int margin = opt.margin >= 0 ? opt.margin : interior_margin(g);

    Decomposition out{ScalarTrajectory<3>(u.t0(), u.dt()), VectorTrajectory(u.t0(), u.dt()), {}, margin, 0.0, 0.0};

    ScalarTrajectory<3> theta(u.t0(), u.dt());
    ScalarTrajectory<3> w(u.t0(), u.dt());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double umax = field_norms(u[i]).max_abs;
        out.u_max = std::max(out.u_max, umax);
        theta.push_back(detail::with_stage("theta", i, [&] { return divergence(u[i]); }));
        out.div_u_rms = std::max(out.div_u_rms, field_norms(theta[i], margin).rms);
        PoissonOptions po = opt.poisson;
        po.reference_scale = std::max(po.reference_scale, umax / g.min_spacing());
        w.push_back(detail::with_stage("poisson", i, [&] { return solve_poisson(theta[i], po); }));
    }

    ScalarTrajectory<3> h = harmonic_defect(w, theta, m);
    std::vector<double> harmonic(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) harmonic[i] = field_norms(div_grad(h[i]), margin).rms;

    ScalarTrajectory<3> h_harmonic(h.t0(), h.dt());
    for (std::size_t i = 0; i < h.size(); ++i)
        h_harmonic.push_back(detail::with_stage("harmonic", i, [&] { return harmonic_projection(h[i], opt.poisson); }));
    const ScalarTrajectory<3> H = double_time_integral(h_harmonic);
    for (std::size_t i = 0; i < u.size(); ++i) {
        ScalarField3 wh = w[i] - H[i];
        out.v.push_back(u[i] - gradient(wh));
        out.w_hat.push_back(std::move(wh));
    }

    out.diagnostics = split_diagnostics(u, out.w_hat, out.v, m, margin);
    for (std::size_t i = 0; i < u.size(); ++i) out.diagnostics[i].harmonic_res = harmonic[i];
    return out;
}

/// Affine gauge coefficient a(t) = slope * t + offset.
struct GaugeCoefficient {
    double slope = 1.0;
    double offset = 3.0;
    double operator()(double t) const { return slope * t + offset; }
};

/// A family g(t, .) of space-harmonic functions, one snapshot per decomposition snapshot.
class GaugeFunction {
public:
    /// Rejects g when max |lap g| over points at least `margin` cells from the
    /// faces exceeds tol * max|g| / min(d)^2 for any snapshot.
    explicit GaugeFunction(ScalarTrajectory<3> g, double tol = 1e-8, int margin = 2) : g_(std::move(g)) {
        g_.require_at_least(1, "GaugeFunction");
        const double d = g_.grid().min_spacing();
        for (std::size_t i = 0; i < g_.size(); ++i) {
            const double lap = field_norms(div_grad(g_[i]), margin).max_abs;
            const double scale = field_norms(g_[i]).max_abs / (d * d);
            if (lap > tol * scale)
                throw InputError("gauge function is not harmonic: max |lap g| = " + detail::fmt_double(lap) +
                                 " at snapshot " + std::to_string(i));
        }
    }

    /// The same static field at every time of `like`.
    static GaugeFunction constant_in_time(const ScalarField3& g, double t0, double dt, std::size_t count,
                                          double tol = 1e-8, int margin = 2) {
        ScalarTrajectory<3> tr(t0, dt);
        for (std::size_t i = 0; i < count; ++i) tr.push_back(g);
        return GaugeFunction(std::move(tr), tol, margin);
    }

    const ScalarTrajectory<3>& trajectory() const { return g_; }

private:
    ScalarTrajectory<3> g_;
};

/// v' = v - a(t) grad g, w_hat' = w_hat + a(t) g. Diagnostics are recomputed
/// over points at least `margin` cells from the faces; harmonic_res is inherited
/// since the Poisson potential and its defect do not change.
inline Decomposition gauge_shift(const Decomposition& d, const GaugeFunction& gauge, const VectorTrajectory& u,
                                 const Material& m, GaugeCoefficient a = {}, int margin = 2) {
    const auto& g = gauge.trajectory();
    if (g.size() != d.v.size() || !(g.grid() == d.v.grid()))
        throw InputError("gauge function must match the decomposition's grid and snapshot count");
    Decomposition out{ScalarTrajectory<3>(d.w_hat.t0(), d.w_hat.dt()), VectorTrajectory(d.v.t0(), d.v.dt()), {},
                      margin, d.u_max, d.div_u_rms};
    for (std::size_t i = 0; i < d.v.size(); ++i) {
        const double ai = a(d.v.time(i));
        VectorField3 vi = d.v[i];
        vi.axpy(-ai, gradient(g[i]));
        ScalarField3 wi = d.w_hat[i];
        wi.axpy(ai, g[i]);
        out.v.push_back(std::move(vi));
        out.w_hat.push_back(std::move(wi));
    }
    out.diagnostics = split_diagnostics(u, out.w_hat, out.v, m, margin);
    for (std::size_t i = 0; i < out.diagnostics.size(); ++i)
        out.diagnostics[i].harmonic_res = d.diagnostics[i].harmonic_res;
    return out;
}

} // namespace lamekit
