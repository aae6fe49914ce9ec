#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lamekit/decompose.hpp"
#include "lamekit/plate.hpp"
#include "lamekit/presets.hpp"

// Verification: reports that pair every measured value with its reference
// and tolerance, refinement studies, speed and frequency extraction, and the
// suites the CLI `verify` command runs.

namespace lamekit {

/// Every pass/fail threshold used by the suites.
struct Thresholds {
    double order_min = 1.7;
    double order_max = 2.3;
    /// Absolute error below which a refinement level counts as exact.
    double error_floor = 1e-11;
    double speed_rel = 0.01;
    double kl_frequency_rel = 1e-3;
    double plate_frequency_rel = 0.01;
    double energy_rel = 0.01;
    double recon_rel = 1e-10;
    double div_rel = 1e-10;
    /// Gauge shift: reconstruction relative to max|u|, and change of rms(div v)
    /// relative to rms(div u).
    double gauge_recon_rel = 1e-12;
    double gauge_div_rel = 1e-10;
};

// ---------------------------------------------------------------------------
// Reports

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct ReportRow {
    std::string quantity;
    std::string params;
    double measured = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    /// "rel": |m - r| <= tol |r|; "abs": |m - r| <= tol; "max": m <= r; "info": not checked.
    std::string comparison;
    bool pass = true;
    std::string note;
};

class VerificationReport {
public:
    explicit VerificationReport(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    const std::vector<ReportRow>& rows() const { return rows_; }
    const std::vector<std::pair<std::string, std::string>>& parameters() const { return params_; }

    void parameter(const std::string& key, const std::string& value) { params_.emplace_back(key, value); }
    void parameter(const std::string& key, double value) { parameter(key, format_double(value)); }

    const ReportRow& check_relative(std::string quantity, std::string params, double measured, double reference,
                                    double tol, std::string note = {}) {
        const bool ok = std::abs(measured - reference) <= tol * std::abs(reference);
        return add({std::move(quantity), std::move(params), measured, reference, tol, "rel", ok, std::move(note)});
    }

    const ReportRow& check_absolute(std::string quantity, std::string params, double measured, double reference,
                                    double tol, std::string note = {}) {
        const bool ok = std::abs(measured - reference) <= tol;
        return add({std::move(quantity), std::move(params), measured, reference, tol, "abs", ok, std::move(note)});
    }

    const ReportRow& check_at_most(std::string quantity, std::string params, double measured, double limit,
                                   std::string note = {}) {
        return add({std::move(quantity), std::move(params), measured, limit, 0.0, "max", measured <= limit,
                    std::move(note)});
    }

    const ReportRow& record(std::string quantity, std::string params, double measured,
                            double reference = std::numeric_limits<double>::quiet_NaN(), std::string note = {}) {
        return add({std::move(quantity), std::move(params), measured, reference,
                    std::numeric_limits<double>::quiet_NaN(), "info", true, std::move(note)});
    }

    /// Appends rows of another report, prefixing their quantity with its name.
    void merge(const VerificationReport& other) {
        for (auto r : other.rows_) {
            r.quantity = other.name_ + "/" + r.quantity;
            rows_.push_back(std::move(r));
        }
    }

    bool passed() const {
        return std::all_of(rows_.begin(), rows_.end(), [](const ReportRow& r) { return r.pass; });
    }

    std::size_t failures() const {
        return static_cast<std::size_t>(std::count_if(rows_.begin(), rows_.end(), [](auto& r) { return !r.pass; }));
    }

    void write_csv(std::ostream& os) const {
        os << "report,quantity,params,measured,reference,tolerance,comparison,pass,note\n";
        for (const auto& r : rows_)
            os << csv_field(name_) << ',' << csv_field(r.quantity) << ',' << csv_field(r.params) << ','
               << format_double(r.measured) << ',' << format_double(r.reference) << ','
               << format_double(r.tolerance) << ',' << r.comparison << ',' << (r.pass ? "true" : "false") << ','
               << csv_field(r.note) << '\n';
    }

    void write_summary(std::ostream& os) const {
        os << "report " << name_ << '\n';
        for (const auto& [k, v] : params_) os << "  " << k << " = " << v << '\n';
        for (const auto& r : rows_) {
            os << (r.comparison == "info" ? "  INFO " : r.pass ? "  PASS " : "  FAIL ") << r.quantity;
            if (!r.params.empty()) os << " [" << r.params << ']';
            os << ": measured " << format_double(r.measured);
            if (r.comparison == "rel" || r.comparison == "abs")
                os << ", reference " << format_double(r.reference) << " +/- " << format_double(r.tolerance)
                   << (r.comparison == "rel" ? " (relative)" : "");
            else if (r.comparison == "max")
                os << ", limit " << format_double(r.reference);
            else if (!std::isnan(r.reference))
                os << ", reference " << format_double(r.reference);
            if (!r.note.empty()) os << " -- " << r.note;
            os << '\n';
        }
        os << name_ << ": " << rows_.size() << " rows, " << failures() << " failed\n";
    }

private:
    static std::string csv_field(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + '"';
    }

    const ReportRow& add(ReportRow r) {
        rows_.push_back(std::move(r));
        return rows_.back();
    }

    std::string name_;
    std::vector<std::pair<std::string, std::string>> params_;
    std::vector<ReportRow> rows_;
};

// ---------------------------------------------------------------------------
// Refinement studies

struct RefinementLevel {
    double d;
    /// Zero for cases without time stepping.
    double dt = 0.0;
};

struct ConvergenceResult {
    std::vector<RefinementLevel> levels;
    std::vector<double> errors;
    /// log2(e_i / e_{i+1}); empty when every error is at the floor.
    std::vector<double> orders;
    bool at_floor = false;
    bool monotone = true;

    bool within(double lo, double hi) const {
        if (at_floor) return true;
        return std::all_of(orders.begin(), orders.end(), [&](double p) { return p >= lo && p <= hi; });
    }
};

/// Evaluates `error_at(level)` on each level. Levels must halve d (and dt,
/// unless every dt is zero). A non-monotone error sequence is flagged, not rejected.
template <class ErrorFn>
ConvergenceResult convergence_study(const std::vector<RefinementLevel>& levels, ErrorFn&& error_at,
                                    double floor = Thresholds{}.error_floor) {
    if (levels.size() < 3) throw InputError("convergence_study needs at least 3 refinement levels");
    const bool timed = levels.front().dt > 0.0;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        const auto& a = levels[i];
        const auto& b = levels[i + 1];
        if (std::abs(a.d / b.d - 2.0) > 1e-9)
            throw InputError("refinement level " + std::to_string(i + 1) + " does not halve the grid spacing");
        if (timed ? std::abs(a.dt / b.dt - 2.0) > 1e-9 : b.dt != 0.0)
            throw InputError("refinement level " + std::to_string(i + 1) + " does not halve the time step");
    }
    ConvergenceResult r;
    r.levels = levels;
    for (const auto& l : levels) r.errors.push_back(error_at(l));
    r.at_floor = std::all_of(r.errors.begin(), r.errors.end(), [&](double e) { return e <= floor; });
    if (!r.at_floor)
        for (std::size_t i = 0; i + 1 < r.errors.size(); ++i) {
            r.orders.push_back(std::log2(r.errors[i] / r.errors[i + 1]));
            if (!(r.errors[i + 1] < r.errors[i])) r.monotone = false;
        }
    return r;
}

/// One row per observed order (or a single floor row) checked against the band.
inline void append_convergence(VerificationReport& rep, const std::string& quantity, const ConvergenceResult& c,
                               const Thresholds& th) {
    std::string errs;
    for (std::size_t i = 0; i < c.errors.size(); ++i)
        errs += (i ? " " : "") + ("d=" + format_double(c.levels[i].d) + ":" + format_double(c.errors[i]));
    if (c.at_floor) {
        rep.check_at_most(quantity + " error", "all levels", *std::max_element(c.errors.begin(), c.errors.end()),
                          th.error_floor, "floor: exact to rounding, order not meaningful; " + errs);
        return;
    }
    const double mid = 0.5 * (th.order_min + th.order_max), half = 0.5 * (th.order_max - th.order_min);
    for (std::size_t i = 0; i < c.orders.size(); ++i) {
        std::string note = errs;
        if (!c.monotone) note = "non-monotone error sequence; " + note;
        rep.check_absolute(quantity + " order", "d=" + format_double(c.levels[i].d) + "->" +
                                                    format_double(c.levels[i + 1].d),
                           c.orders[i], mid, half, note);
    }
}

// ---------------------------------------------------------------------------
// Speed extraction

namespace detail {
/// Mean of each component along `axis`, averaged over the other axes.
template <std::size_t Dim>
std::vector<double> axis_profile(const ScalarField<Dim>& f, std::size_t axis) {
    const auto& g = f.grid();
    std::vector<double> p(g.n(axis), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) p[g.multi(i)[axis]] += f[i];
    const double count = static_cast<double>(g.size() / g.n(axis));
    for (auto& v : p) v /= count;
    return p;
}

template <std::size_t Dim>
std::vector<std::vector<double>> axis_profiles(const ScalarField<Dim>& f, std::size_t axis) {
    return {axis_profile(f, axis)};
}

template <std::size_t Dim, std::size_t Comp>
std::vector<std::vector<double>> axis_profiles(const VectorField<Dim, Comp>& v, std::size_t axis) {
    std::vector<std::vector<double>> out;
    for (std::size_t c = 0; c < Comp; ++c) out.push_back(axis_profile(v[c], axis));
    return out;
}

using Spectrum = std::vector<std::complex<double>>;

inline Spectrum dft(const std::vector<double>& x) {
    const std::size_t N = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(N);
    Spectrum X(N);
    for (std::size_t k = 0; k < N; ++k) {
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * j) % N) / static_cast<double>(N);
            s += (x[j] - mean) * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        X[k] = s;
    }
    return X;
}

/// Shift s (in samples, continuous) maximizing sum_c sum_x p_c(x) q_c(x + s),
/// using the trigonometric interpolant of the periodic cross-correlation.
inline double correlation_lag(const std::vector<std::vector<double>>& p, const std::vector<std::vector<double>>& q) {
    const std::size_t N = p.front().size();
    Spectrum C(N, 0.0);
    double energy = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        const Spectrum P = dft(p[c]), Q = dft(q[c]);
        for (std::size_t k = 0; k < N; ++k) {
            C[k] += std::conj(P[k]) * Q[k];
            energy += std::norm(P[k]);
        }
    }
    if (!(energy > 1e-24 * static_cast<double>(N * N)))
        throw NumericalError("degenerate correlation: the profile along the axis is flat");
    auto corr = [&](double s) {
        double v = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double kk = (2 * k < N) ? double(k) : (2 * k == N ? 0.0 : double(k) - double(N));
            const double ang = 2.0 * std::numbers::pi * kk * s / static_cast<double>(N);
            if (2 * k == N)
                v += C[k].real() * std::cos(std::numbers::pi * s);
            else
                v += (C[k] * std::complex<double>(std::cos(ang), std::sin(ang))).real();
        }
        return v;
    };
    std::size_t best = 0;
    double best_v = corr(0.0);
    for (std::size_t s = 1; s < N; ++s) {
        const double v = corr(static_cast<double>(s));
        if (v > best_v) best_v = v, best = s;
    }
    double lo = static_cast<double>(best) - 1.0, hi = static_cast<double>(best) + 1.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = corr(x1), f2 = corr(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (f1 > f2) {
            hi = x2, x2 = x1, f2 = f1;
            x1 = hi - phi * (hi - lo), f1 = corr(x1);
        } else {
            lo = x1, x1 = x2, f1 = f2;
            x2 = lo + phi * (hi - lo), f2 = corr(x2);
        }
    }
    double s = 0.5 * (lo + hi);
    const double n = static_cast<double>(N);
    s = std::fmod(s, n);
    if (s > n / 2) s -= n;
    if (s <= -n / 2) s += n;
    return s;
}
} // namespace detail

/// Signed propagation speed along `axis` on a periodic grid. The lag between
/// consecutive snapshots is accumulated, so the total travel may exceed half
/// the period as long as each recorded interval moves less than that.
template <class Field>
double wave_speed_measure(const Trajectory<Field>& tr, std::size_t axis) {
    tr.require_at_least(2, "wave_speed_measure");
    const auto& g = tr.grid();
    if (axis >= g.n().size()) throw InputError("wave_speed_measure: axis out of range");
    if (!g.periodic()) throw InputError("wave_speed_measure needs a periodic grid");
    double lag = 0.0;
    auto prev = detail::axis_profiles(tr[0], axis);
    for (std::size_t i = 1; i < tr.size(); ++i) {
        auto next = detail::axis_profiles(tr[i], axis);
        lag += detail::correlation_lag(prev, next);
        prev = std::move(next);
    }
    if (std::abs(lag) < 1e-6)
        throw NumericalError("degenerate correlation: the profile does not translate along axis " +
                             std::to_string(axis + 1));
    return lag * g.d(axis) / (tr.time(tr.size() - 1) - tr.time(0));
}

// ---------------------------------------------------------------------------
// Frequency extraction

/// Angular frequency of an oscillating series from its zero crossings,
/// located by linear interpolation. Needs at least three crossings.
inline double measure_angular_frequency(const std::vector<double>& series, double dt) {
    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const double a = series[i], b = series[i + 1];
        if (a == 0.0 && i > 0) {
            crossings.push_back(i * dt);
        } else if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
            crossings.push_back((i + a / (a - b)) * dt);
        }
    }
    if (crossings.size() < 3)
        throw NumericalError("frequency measurement needs at least 3 zero crossings, found " +
                             std::to_string(crossings.size()));
    return std::numbers::pi * static_cast<double>(crossings.size() - 1) / (crossings.back() - crossings.front());
}

/// Projection coefficient of f on a mode shape: <f, phi> / <phi, phi>.
template <std::size_t Dim>
double modal_amplitude(const ScalarField<Dim>& f, const ScalarField<Dim>& phi) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.grid().size(); ++i) {
        num += f[i] * phi[i];
        den += phi[i] * phi[i];
    }
    if (!(den > 0.0)) throw InputError("modal_amplitude: zero mode shape");
    return num / den;
}

/// Simply supported mode sin(m pi x1 / a) sin(n pi x2 / b) on a Dirichlet rectangle.
inline ScalarField2 sine_mode(const Grid2& g, int m, int n) {
    const double a = g.extent(0), b = g.extent(1);
    return ScalarField2::sample(g, [&](const std::array<double, 2>& x) {
        return std::sin(m * std::numbers::pi * (x[0] - g.origin()[0]) / a) *
               std::sin(n * std::numbers::pi * (x[1] - g.origin()[1]) / b);
    });
}

struct ModeRun {
    double omega = 0.0;
    double dt = 0.0;
    int steps = 0;
};

/// Standing (m, n) mode of f_tt = speed^2 lap f from rest; frequency of the modal amplitude.
inline ModeRun run_membrane_mode(const Grid2& g, double speed, int m, int n, double periods = 4.0,
                                 double dt_fraction = 0.5) {
    const double k = std::hypot(m * std::numbers::pi / g.extent(0), n * std::numbers::pi / g.extent(1));
    const double dt = dt_fraction * wave2_max_dt(g, speed);
    const int steps = static_cast<int>(std::ceil(periods * 2.0 * std::numbers::pi / (speed * k) / dt));
    const ScalarField2 phi = sine_mode(g, m, n);
    Wave2State s = wave2_initial(phi, ScalarField2(g), dt, speed);
    std::vector<double> series{modal_amplitude(s.curr, phi)};
    for (int i = 0; i < steps; ++i) {
        s = step_wave2(s, speed);
        series.push_back(modal_amplitude(s.curr, phi));
    }
    return {measure_angular_frequency(series, dt), dt, steps};
}

/// Kirchhoff-Love (m, n) mode from rest. The step is capped so that each
/// period spans at least `steps_per_period` steps.
inline ModeRun run_kl_mode(const PlateConfig& cfg, int m, int n, double periods = 4.0,
                           double steps_per_period = 400.0) {
    const auto& g = cfg.grid;
    const double omega = kl_modal_frequency(m, n, g.extent(0), g.extent(1), cfg);
    const double period = 2.0 * std::numbers::pi / omega;
    const double dt = std::min(kl_max_dt(cfg), period / steps_per_period);
    const int steps = static_cast<int>(std::ceil(periods * period / dt));
    const ScalarField2 phi = sine_mode(g, m, n);
    KLState s = kl_initial(phi, ScalarField2(g), dt, cfg);
    std::vector<double> series{modal_amplitude(s.curr, phi)};
    for (int i = 0; i < steps; ++i) {
        s = kl_step(s, cfg);
        series.push_back(modal_amplitude(s.curr, phi));
    }
    return {measure_angular_frequency(series, dt), dt, steps};
}

// ---------------------------------------------------------------------------
// Energy drift

/// Largest |E_n - E_0| / |E_0| over `steps` steps, sampling every `every` steps.
template <class State, class StepFn, class EnergyFn>
double max_energy_drift(State s, int steps, StepFn&& step_fn, EnergyFn&& energy_fn, int every = 1) {
    const double e0 = energy_fn(s);
    if (!(std::abs(e0) > 0.0)) throw InputError("energy drift needs nonzero initial energy");
    double worst = 0.0;
    for (int n = 1; n <= steps; ++n) {
        s = step_fn(s);
        if (n % every == 0 || n == steps) worst = std::max(worst, std::abs(energy_fn(s) - e0) / std::abs(e0));
    }
    return worst;
}

/// Smooth deterministic 2D data vanishing on the edges of a Dirichlet rectangle.
inline ScalarField2 smooth_plate_data(const Grid2& g, int kmax = 3) {
    ScalarField2 f(g);
    for (int p = 1; p <= kmax; ++p)
        for (int q = 1; q <= kmax; ++q) f.axpy(1.0 / (p * p + q * q) * ((p + q) % 2 ? -1.0 : 1.0), sine_mode(g, p, q));
    return f;
}

// ---------------------------------------------------------------------------
// Decomposition suite

/// Runs decompose and a gauge shift by g = x1 x2 with a(t) = t + 3, and reports
/// the diagnostics, the gauge deltas and how the displacement was split.
inline VerificationReport decomposition_suite(const VectorTrajectory& u, const Material& m,
                                              const Thresholds& th = {}, const DecomposeOptions& opt = {}) {
    VerificationReport rep("decomposition");
    const Decomposition d = decompose(u, m, opt);
    auto rel = [](double x, double scale) { return scale > 0.0 ? x / scale : x; };

    double recon = 0.0, div = 0.0, ws = 0.0, wv = 0.0, harm = 0.0;
    for (const auto& r : d.diagnostics) {
        recon = std::max(recon, r.recon_err);
        div = std::max(div, r.div_v_rms);
        if (r.endpoint) continue;
        ws = std::max(ws, r.wave_res_scalar);
        wv = std::max(wv, r.wave_res_vector);
        harm = std::max(harm, r.harmonic_res);
    }
    const std::string params = "snapshots=" + std::to_string(u.size());
    rep.check_at_most("reconstruction max|u - v - grad w_hat| / max|u|", params, rel(recon, d.u_max), th.recon_rel);
    rep.check_at_most("rms(div v) / rms(div u)", params, rel(div, d.div_u_rms), th.div_rel);
    rep.record("scalar wave residual rms (centered snapshots)", params, ws);
    rep.record("vector wave residual rms (centered snapshots)", params, wv);
    rep.record("harmonic defect rms(lap h) (centered snapshots)", params, harm);

    const auto& g = u.grid();
    const auto x1x2 = ScalarField3::sample(g, [](const Vec3& x) { return x[0] * x[1]; });
    const auto gauge = GaugeFunction::constant_in_time(x1x2, u.t0(), u.dt(), u.size());
    const Decomposition s = gauge_shift(d, gauge, u, m);
    const auto base = split_diagnostics(u, d.w_hat, d.v, m, s.margin);
    double recon_s = 0.0, div_delta = 0.0, v_change = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        recon_s = std::max(recon_s, s.diagnostics[i].recon_err);
        div_delta = std::max(div_delta, std::abs(s.diagnostics[i].div_v_rms - base[i].div_v_rms));
        v_change = std::max(v_change, field_norms(s.v[i] - d.v[i], s.margin).max_abs);
    }
    const std::string gp = "g=x1*x2, a(t)=t+3, margin=" + std::to_string(s.margin);
    rep.check_at_most("gauge: reconstruction / max|u|", gp, rel(recon_s, d.u_max), th.gauge_recon_rel);
    rep.check_at_most("gauge: |rms(div v') - rms(div v)| / rms(div u)", gp, rel(div_delta, d.div_u_rms),
                      th.gauge_div_rel);
    rep.record("gauge: max|v' - v|", gp, v_change, std::numeric_limits<double>::quiet_NaN(),
               "nonzero: the split moved while u = v + grad w_hat held");

    double grad_part = 0.0, sol_part = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        grad_part = std::max(grad_part, field_norms(gradient(d.w_hat[i])).rms);
        sol_part = std::max(sol_part, field_norms(d.v[i]).rms);
    }
    rep.record("split: max rms(grad w_hat)", "zero-mean gauge", grad_part);
    rep.record("split: max rms(v)", "zero-mean gauge", sol_part);
    return rep;
}

// ---------------------------------------------------------------------------
// Suites

struct SuiteOptions {
    Material material = Material::from_lame(1.0, 0.4, 0.4);
    Thresholds thresholds;
    std::uint64_t seed = 1;
    /// Coarsest in-plane resolution for the three-level studies.
    int base_n = 16;
    /// Plate: side lengths, points per side, thickness, modes.
    double plate_a = 1.0;
    double plate_b = 1.0;
    int plate_points = 65;
    double plate_thickness = 0.1;
    std::vector<std::array<int, 2>> plate_modes{{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}};
    int energy_steps = 1000;
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"operators", "decomposition", "waves", "plate", "energy", "all"};
    return names;
}

namespace detail {
inline Grid3 periodic_box(int n1, int n2, int n3, double d) {
    return Grid3({n1, n2, n3}, {d, d, d}, Boundary::Periodic);
}

/// In-plane oblique P and S plane waves on an n x n x 4 periodic slab of unit width.
struct MixedPlaneWaves {
    Vec3 kp{2 * std::numbers::pi, 4 * std::numbers::pi, 0.0};
    Vec3 ks{4 * std::numbers::pi, 2 * std::numbers::pi, 0.0};
    Vec3 ps{1 / std::sqrt(5.0), -2 / std::sqrt(5.0), 0.0};
    double ap = 1.0, as = 0.5;

    VectorField3 displacement(const Grid3& g, const Material& m, double t) const {
        return plane_p_wave(g, kp, ap, m, t) + plane_s_wave(g, ks, ps, as, m, t);
    }
    VectorField3 velocity(const Grid3& g, const Material& m, double t) const {
        return plane_p_wave_velocity(g, kp, ap, m, t) + plane_s_wave_velocity(g, ks, ps, as, m, t);
    }
};
} // namespace detail

/// Solver trajectory of mixed oblique P + S waves on an n x n x 4 slab with
/// d = 1/n, dt = 0.25 d, recorded every step over `steps` steps.
inline VectorTrajectory mixed_wave_trajectory(int n, int steps, const Material& m) {
    const double d = 1.0 / n;
    const Grid3 g = detail::periodic_box(n, n, 4, d);
    const detail::MixedPlaneWaves w;
    const double dt = 0.25 * d;
    return simulate(initial_state(w.displacement(g, m, 0.0), w.velocity(g, m, 0.0), dt, m), m, steps);
}

inline VerificationReport operators_suite(const SuiteOptions& opt = {}) {
    VerificationReport rep("operators");
    const Thresholds& th = opt.thresholds;
    const double tau = 2.0 * std::numbers::pi;
    std::vector<RefinementLevel> levels;
    for (int l = 0; l < 3; ++l) levels.push_back({1.0 / (opt.base_n << l), 0.0});
    rep.parameter("levels", std::to_string(opt.base_n) + "," + std::to_string(opt.base_n * 2) + "," +
                                std::to_string(opt.base_n * 4));

    auto cube = [](const RefinementLevel& l) {
        const int n = static_cast<int>(std::lround(1.0 / l.d));
        return detail::periodic_box(n, n, n, l.d);
    };
    auto f = [&](const Vec3& x) { return std::sin(tau * x[0]) * std::cos(tau * x[1]) * std::sin(tau * 2 * x[2]); };

    append_convergence(rep, "gradient", convergence_study(levels, [&](const RefinementLevel& l) {
        const Grid3 g = cube(l);
        const auto exact = VectorField3::sample(g, [&](const Vec3& x) {
            const double s0 = std::sin(tau * x[0]), c0 = std::cos(tau * x[0]);
            const double s1 = std::sin(tau * x[1]), c1 = std::cos(tau * x[1]);
            const double s2 = std::sin(2 * tau * x[2]), c2 = std::cos(2 * tau * x[2]);
            return Vec3{tau * c0 * c1 * s2, -tau * s0 * s1 * s2, 2 * tau * s0 * c1 * c2};
        });
        return field_norms(gradient(ScalarField3::sample(g, f)) - exact).max_abs;
    }, th.error_floor), th);

    append_convergence(rep, "divergence", convergence_study(levels, [&](const RefinementLevel& l) {
        const Grid3 g = cube(l);
        const auto v = VectorField3::sample(g, [&](const Vec3& x) {
            return Vec3{std::sin(tau * x[0]) * std::cos(tau * x[1]), std::sin(tau * x[1]) * std::sin(tau * x[2]),
                        std::cos(tau * x[2]) * std::cos(tau * x[0])};
        });
        const auto exact = ScalarField3::sample(g, [&](const Vec3& x) {
            return tau * std::cos(tau * x[0]) * std::cos(tau * x[1]) + tau * std::cos(tau * x[1]) * std::sin(tau * x[2]) -
                   tau * std::sin(tau * x[2]) * std::cos(tau * x[0]);
        });
        return field_norms(divergence(v) - exact).max_abs;
    }, th.error_floor), th);

    append_convergence(rep, "laplacian", convergence_study(levels, [&](const RefinementLevel& l) {
        const Grid3 g = cube(l);
        const auto fs = ScalarField3::sample(g, f);
        return field_norms(laplacian(fs) + (6.0 * tau * tau) * fs).max_abs;
    }, th.error_floor), th);

    append_convergence(rep, "gradient of a linear field", convergence_study(levels, [&](const RefinementLevel& l) {
        const int n = static_cast<int>(std::lround(1.0 / l.d)) + 1;
        const Grid3 g({n, n, n}, {l.d, l.d, l.d}, Boundary::Dirichlet);
        const auto lin = ScalarField3::sample(g, [](const Vec3& x) { return 2 * x[0] - x[1] + 0.5 * x[2]; });
        const auto grad = gradient(lin);
        const auto exact = VectorField3::sample(g, [](const Vec3&) { return Vec3{2.0, -1.0, 0.5}; });
        return field_norms(grad - exact).max_abs;
    }, th.error_floor), th);

    const int n2 = opt.base_n * 2;
    const Grid2 g2({n2, n2}, {1.0 / n2, 1.0 / n2}, Boundary::Periodic);
    const auto V = ScalarField2::sample(g2, [&](const std::array<double, 2>& x) {
        return std::sin(tau * x[0]) * std::sin(tau * x[1]);
    });
    rep.check_at_most("max|div stream_velocity(V)|", "periodic " + std::to_string(n2) + "^2",
                      field_norms(divergence(stream_velocity(V))).max_abs, th.error_floor);
    return rep;
}

inline VerificationReport decomposition_report(const SuiteOptions& opt = {}) {
    VerificationReport rep("decomposition");
    const Thresholds& th = opt.thresholds;
    const Material& m = opt.material;
    rep.parameter("grid", "n x n x 4 periodic slab, d = 1/n, dt = d/4");
    rep.parameter("levels", std::to_string(opt.base_n) + "," + std::to_string(opt.base_n * 2) + "," +
                                std::to_string(opt.base_n * 4));

    std::vector<RefinementLevel> levels;
    for (int l = 0; l < 3; ++l) levels.push_back({1.0 / (opt.base_n << l), 0.25 / (opt.base_n << l)});

    std::vector<double> ws, wv, harm;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const int n = opt.base_n << l;
        const auto u = mixed_wave_trajectory(n, n / 2, m);
        const auto sub = decomposition_suite(u, m, th);
        VerificationReport tagged("n=" + std::to_string(n));
        for (const auto& r : sub.rows()) {
            if (r.comparison == "max")
                tagged.check_at_most(r.quantity, r.params, r.measured, r.reference, r.note);
            else if (r.quantity.rfind("scalar wave", 0) == 0)
                ws.push_back(r.measured);
            else if (r.quantity.rfind("vector wave", 0) == 0)
                wv.push_back(r.measured);
            else if (r.quantity.rfind("harmonic", 0) == 0)
                harm.push_back(r.measured);
        }
        rep.merge(tagged);
    }
    auto lookup = [&](const std::vector<double>& series) {
        return [&series, &levels](const RefinementLevel& l) {
            for (std::size_t i = 0; i < levels.size(); ++i)
                if (levels[i].d == l.d) return series[i];
            return std::numeric_limits<double>::quiet_NaN();
        };
    };
    append_convergence(rep, "scalar wave residual", convergence_study(levels, lookup(ws), th.error_floor), th);
    append_convergence(rep, "vector wave residual", convergence_study(levels, lookup(wv), th.error_floor), th);
    append_convergence(rep, "harmonic defect", convergence_study(levels, lookup(harm), th.error_floor), th);
    return rep;
}

inline VerificationReport waves_suite(const SuiteOptions& opt = {}) {
    VerificationReport rep("waves");
    const Thresholds& th = opt.thresholds;
    const Material& m = opt.material;
    const auto c = wave_speeds(m);

    // 128 x 64 x 4 slab, waves along x1.
    const double d = 1.0 / 64;
    const Grid3 slab = detail::periodic_box(128, 64, 4, d);
    const double dt = cfl_max_dt(slab, m);
    const int steps = 240, every = 10;
    const Vec3 k = grid_wave_vector(slab, {1, 0, 0});
    const std::string params = "128x64x4, " + std::to_string(steps) + " steps at the CFL step";
    rep.parameter("dt", dt);

    const auto p_traj = simulate(initial_state(plane_p_wave(slab, k, 1.0, m, 0.0),
                                               plane_p_wave_velocity(slab, k, 1.0, m, 0.0), dt, m),
                                 m, steps, every);
    rep.check_relative("P-wave speed", params, wave_speed_measure(p_traj, 0), c.c_p, th.speed_rel);

    const Vec3 pol{0.0, 1.0, 0.0};
    const auto s_traj = simulate(initial_state(plane_s_wave(slab, k, pol, 1.0, m, 0.0),
                                               plane_s_wave_velocity(slab, k, pol, 1.0, m, 0.0), dt, m),
                                 m, steps, every);
    rep.check_relative("S-wave speed", params, wave_speed_measure(s_traj, 0), c.c_s, th.speed_rel);

    // Plane-wave simulation error at a fixed time, d and dt halved together.
    std::vector<RefinementLevel> levels;
    for (int l = 0; l < 3; ++l) levels.push_back({1.0 / (opt.base_n << l), 0.25 / (opt.base_n << l)});
    const detail::MixedPlaneWaves w;
    append_convergence(rep, "plane-wave simulation error", convergence_study(levels, [&](const RefinementLevel& l) {
        const int n = static_cast<int>(std::lround(1.0 / l.d));
        const Grid3 g = detail::periodic_box(n, n, 4, l.d);
        const int n_steps = n;  // T = 0.25
        const auto tr = simulate(initial_state(w.displacement(g, m, 0.0), w.velocity(g, m, 0.0), l.dt, m), m,
                                 n_steps, n_steps);
        return field_norms(tr.back() - w.displacement(g, m, n_steps * l.dt)).max_abs;
    }, th.error_floor), th);
    return rep;
}

inline PlateConfig suite_plate_config(const SuiteOptions& opt) {
    const int n = opt.plate_points;
    const Grid2 g({n, n}, {opt.plate_a / (n - 1), opt.plate_b / (n - 1)}, Boundary::Dirichlet);
    return PlateConfig(g, opt.plate_thickness, opt.material);
}

inline VerificationReport plate_suite(const SuiteOptions& opt = {}) {
    VerificationReport rep("plate");
    const Thresholds& th = opt.thresholds;
    const PlateConfig cfg = suite_plate_config(opt);
    const auto c = wave_speeds(cfg.material);
    rep.parameter("plate", format_double(opt.plate_a) + " x " + format_double(opt.plate_b) + ", h = " +
                               format_double(opt.plate_thickness) + ", " + std::to_string(opt.plate_points) +
                               " points per side");
    if (auto warn = cfg.thickness_warning()) rep.parameter("warning", *warn);

    for (const auto& [mi, ni] : opt.plate_modes) {
        const std::string mode = "(" + std::to_string(mi) + "," + std::to_string(ni) + ")";
        const double k = std::hypot(mi * std::numbers::pi / opt.plate_a, ni * std::numbers::pi / opt.plate_b);
        const ModeRun kl = run_kl_mode(cfg, mi, ni);
        rep.check_relative("Kirchhoff-Love modal frequency", mode, kl.omega,
                           kl_modal_frequency(mi, ni, opt.plate_a, opt.plate_b, cfg), th.kl_frequency_rel);
        const ModeRun w1 = run_membrane_mode(cfg.grid, c.c_p, mi, ni);
        const ModeRun vv = run_membrane_mode(cfg.grid, c.c_s, mi, ni);
        rep.check_relative("w1 standing-mode frequency", mode, w1.omega, c.c_p * k, th.plate_frequency_rel);
        rep.check_relative("V standing-mode frequency", mode, vv.omega, c.c_s * k, th.plate_frequency_rel);
        rep.check_relative("w1/V frequency ratio", mode, w1.omega / vv.omega, std::sqrt((cfg.material.lambda() + 2 * cfg.material.mu()) / cfg.material.mu()),
                           th.plate_frequency_rel);
    }
    return rep;
}

inline VerificationReport energy_suite(const SuiteOptions& opt = {}) {
    VerificationReport rep("energy");
    const Thresholds& th = opt.thresholds;
    const Material& m = opt.material;
    const int steps = opt.energy_steps;
    rep.parameter("steps", std::to_string(steps));

    const Grid3 g = detail::periodic_box(32, 32, 32, 1.0 / 32);
    const double dt = cfl_max_dt(g, m);
    const SimState s0 = initial_state(random_smooth_field(g, opt.seed, 1), random_smooth_field(g, opt.seed + 1, 1),
                                      dt, m);
    const double drift = max_energy_drift(
        s0, steps, [&](const SimState& s) { return step(s, m); },
        [&](const SimState& s) { return discrete_energy(s, m).total(); }, 10);
    rep.check_at_most("elastodynamic energy drift", "32^3 periodic, random smooth, CFL step", drift, th.energy_rel);

    const PlateConfig cfg = suite_plate_config(opt);
    const auto c = wave_speeds(m);
    const ScalarField2 f0 = smooth_plate_data(cfg.grid);
    const ScalarField2 f1 = smooth_plate_data(cfg.grid, 2);
    for (const auto& [name, speed] : {std::pair{"w1", c.c_p}, std::pair{"V0", c.c_s}, std::pair{"V1", c.c_s}}) {
        const double dtw = wave2_max_dt(cfg.grid, speed);
        const Wave2State w0 = wave2_initial(name == std::string("V1") ? f1 : f0, ScalarField2(cfg.grid), dtw, speed);
        const double dw = max_energy_drift(
            w0, steps, [&](const Wave2State& s) { return step_wave2(s, speed); },
            [&](const Wave2State& s) { return wave2_energy(s, speed); });
        rep.check_at_most(std::string(name) + " energy drift", "CFL step", dw, th.energy_rel);
    }
    const KLState k0 = kl_initial(f0, ScalarField2(cfg.grid), kl_max_dt(cfg), cfg);
    const double dk = max_energy_drift(
        k0, steps, [&](const KLState& s) { return kl_step(s, cfg); },
        [&](const KLState& s) { return kl_energy(s, cfg); });
    rep.check_at_most("Kirchhoff-Love energy drift", "highest-mode step limit", dk, th.energy_rel);
    return rep;
}

/// Runs one named suite; "all" runs every suite. Unknown names throw InputError.
inline std::vector<VerificationReport> run_suite(const std::string& name, const SuiteOptions& opt = {}) {
    if (name == "operators") return {operators_suite(opt)};
    if (name == "decomposition") return {decomposition_report(opt)};
    if (name == "waves") return {waves_suite(opt)};
    if (name == "plate") return {plate_suite(opt)};
    if (name == "energy") return {energy_suite(opt)};
    if (name == "all")
        return {operators_suite(opt), decomposition_report(opt), waves_suite(opt), plate_suite(opt),
                energy_suite(opt)};
    std::string known;
    for (const auto& s : suite_names()) known += (known.empty() ? "" : ", ") + s;
    throw InputError("unknown verification suite '" + name + "' (known: " + known + ")");
}

} // namespace lamekit
