#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lamekit/config.hpp"
#include "lamekit/decompose.hpp"
#include "lamekit/elastodyn.hpp"
#include "lamekit/plate.hpp"
#include "lamekit/presets.hpp"
#include "lamekit/snapshot.hpp"
#include "lamekit/verify.hpp"

// The four user-facing commands. Each one resolves and validates its whole
// configuration before touching the output directory, echoes the resolved
// configuration as effective.cfg, and reports through exit codes:
//   0 success, 1 verification failure, 2 usage or config error, 3 runtime error.

namespace lamekit {

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2, kExitRuntime = 3 };

struct CommandOptions {
    std::filesystem::path config;
    std::filesystem::path out_dir = "out";
    /// Reference mode. Every code path is already sequential, so this only
    /// appears in the run summary.
    bool serial = false;
    std::optional<std::uint64_t> seed;
    /// Suite for `verify`; falls back to verify.suite in the config.
    std::string suite;
};

inline constexpr const char* kEffectiveConfigName = "effective.cfg";

// ---------------------------------------------------------------------------
// Config resolution

inline Grid3 grid_from_config(Config& cfg) {
    std::array<int, 3> n{};
    std::array<double, 3> d{}, o{};
    for (std::size_t a = 0; a < 3; ++a) {
        const std::string ax = std::to_string(a + 1);
        const long v = cfg.get_int("domain.n" + ax);
        if (v < 4 || v > 4096) throw cfg.error("domain.n" + ax, "point count must lie in [4, 4096]");
        n[a] = static_cast<int>(v);
        if (cfg.has("domain.d" + ax))
            d[a] = cfg.get_positive("domain.d" + ax);
        else if (cfg.has("domain.d"))
            d[a] = cfg.get_positive("domain.d");
        else
            throw ConfigError("config '" + cfg.source() + "': missing required key 'domain.d" + ax + "' (or domain.d)");
        o[a] = cfg.get_double("domain.origin" + ax, 0.0);
    }
    const std::string b = cfg.get_string("domain.boundary", "periodic");
    Boundary boundary;
    try {
        boundary = boundary_from_string(b);
    } catch (const InputError& e) {
        throw cfg.error("domain.boundary", e.what());
    }
    return Grid3(n, d, boundary, o);
}

inline Material material_from_config(const Config& cfg) {
    const bool lame = cfg.has("material.lambda") || cfg.has("material.mu");
    const bool engineering = cfg.has("material.E") || cfg.has("material.sigma");
    if (lame && engineering)
        throw cfg.error(cfg.has("material.E") ? "material.E" : "material.sigma",
                        "give exactly one coefficient pair: material.lambda/material.mu or material.E/material.sigma");
    if (!lame && !engineering)
        throw ConfigError("config '" + cfg.source() +
                          "': material needs material.rho plus material.lambda/material.mu or material.E/material.sigma");
    const double rho = cfg.get_double("material.rho");
    try {
        if (lame) return Material::from_lame(rho, cfg.get_double("material.lambda"), cfg.get_double("material.mu"));
        return Material::from_engineering(rho, cfg.get_double("material.E"), cfg.get_double("material.sigma"));
    } catch (const DomainError& e) {
        throw ConfigError("config '" + cfg.source() + "', material block: " + e.what());
    }
}

/// Resolves time.dt ("auto" or a number) and refuses steps above the CFL limit.
inline double resolve_dt(Config& cfg, const Grid3& g, const Material& m) {
    const double limit = cfl_max_dt(g, m);
    const std::string text = cfg.get_string("time.dt", "auto");
    const double dt = text == "auto" ? limit : cfg.get_positive("time.dt");
    if (dt > limit * (1.0 + 1e-12))
        throw cfg.error("time.dt", "dt = " + format_double(dt) + " exceeds the CFL limit " + format_double(limit) +
                                       " for this grid and material");
    cfg.set("time.dt", to_exact_string(dt));
    return dt;
}

inline Thresholds thresholds_from_config(Config& cfg) {
    Thresholds t;
    t.order_min = cfg.get_double("tolerance.order_min", t.order_min);
    t.order_max = cfg.get_double("tolerance.order_max", t.order_max);
    t.error_floor = cfg.get_double("tolerance.error_floor", t.error_floor);
    t.speed_rel = cfg.get_double("tolerance.speed_rel", t.speed_rel);
    t.kl_frequency_rel = cfg.get_double("tolerance.kl_frequency_rel", t.kl_frequency_rel);
    t.plate_frequency_rel = cfg.get_double("tolerance.plate_frequency_rel", t.plate_frequency_rel);
    t.energy_rel = cfg.get_double("tolerance.energy_rel", t.energy_rel);
    t.recon_rel = cfg.get_double("tolerance.recon_rel", t.recon_rel);
    t.div_rel = cfg.get_double("tolerance.div_rel", t.div_rel);
    t.gauge_recon_rel = cfg.get_double("tolerance.gauge_recon_rel", t.gauge_recon_rel);
    t.gauge_div_rel = cfg.get_double("tolerance.gauge_div_rel", t.gauge_div_rel);
    if (!(t.order_min < t.order_max)) throw cfg.error("tolerance.order_min", "must be below tolerance.order_max");
    return t;
}

/// Parses "m,n; m,n; ..." into mode pairs. An empty value is an empty list.
inline std::vector<std::array<int, 2>> parse_mode_list(const Config& cfg, const std::string& key) {
    std::vector<std::array<int, 2>> modes;
    std::string text = cfg.get_string(key);
    std::istringstream is(text);
    for (std::string item; std::getline(is, item, ';');) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        int m = 0, n = 0;
        char comma = 0, extra = 0;
        std::istringstream ps(item);
        if (!(ps >> m >> comma >> n) || comma != ',' || (ps >> extra) || m < 1 || n < 1)
            throw cfg.error(key, "expected pairs 'm,n' of positive integers separated by ';', got '" + item + "'");
        modes.push_back({m, n});
    }
    return modes;
}

namespace detail {
inline Vec3 config_vec3(Config& cfg, const std::string& stem, const Vec3& fallback) {
    Vec3 v{};
    for (std::size_t a = 0; a < 3; ++a) v[a] = cfg.get_double(stem + std::to_string(a + 1), fallback[a]);
    return v;
}

inline Vec3 config_modes(Config& cfg, const std::string& stem, const std::array<int, 3>& fallback, const Grid3& g) {
    std::array<int, 3> m{};
    for (std::size_t a = 0; a < 3; ++a) m[a] = static_cast<int>(cfg.get_int(stem + std::to_string(a + 1), fallback[a]));
    if (m == std::array<int, 3>{0, 0, 0}) throw cfg.error(stem + "1", "wave mode numbers must not all be zero");
    return grid_wave_vector(g, m);
}

struct InitialData {
    VectorField3 u;
    VectorField3 v;
};

inline InitialData initial_from_config(Config& cfg, const Grid3& g, const Material& m, std::uint64_t seed) {
    const std::string kind = cfg.get_string("initial.kind", "zero");
    InitialData out{VectorField3(g), VectorField3(g)};
    const bool p = kind == "p_wave" || kind == "p_plus_s";
    const bool s = kind == "s_wave" || kind == "p_plus_s";
    if (p) {
        const Vec3 k = config_modes(cfg, "initial.p_k", {1, 2, 0}, g);
        const double A = cfg.get_double("initial.p_amplitude", 1.0);
        out.u += plane_p_wave(g, k, A, m, 0.0);
        out.v += plane_p_wave_velocity(g, k, A, m, 0.0);
    }
    if (s) {
        const Vec3 k = config_modes(cfg, "initial.s_k", {2, 1, 0}, g);
        Vec3 pol = config_vec3(cfg, "initial.s_pol", {1.0, -2.0, 0.0});
        const double len = norm3(pol);
        if (!(len > 0.0)) throw cfg.error("initial.s_pol1", "polarization must be nonzero");
        for (double& c : pol) c /= len;
        if (std::abs(dot3(pol, k)) > 1e-12 * norm3(k))
            throw cfg.error("initial.s_pol1", "polarization must be orthogonal to the S wave vector");
        const double A = cfg.get_double("initial.s_amplitude", 0.5);
        out.u += plane_s_wave(g, k, pol, A, m, 0.0);
        out.v += plane_s_wave_velocity(g, k, pol, A, m, 0.0);
    }
    if (kind == "random_smooth") {
        const long kmax = cfg.get_int_in("initial.kmax", 2, 1, 16);
        out.u = random_smooth_field(g, seed, static_cast<int>(kmax), cfg.get_double("initial.amplitude", 1.0));
    } else if (kind != "zero" && !p && !s) {
        throw cfg.error("initial.kind", "unknown initial condition '" + kind +
                                            "' (expected zero|p_wave|s_wave|p_plus_s|random_smooth)");
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) { write_atomically(path, text); }

inline void echo_config(const Config& cfg, const std::filesystem::path& out_dir, const std::string& command) {
    write_text(out_dir / kEffectiveConfigName,
               cfg.dump("effective configuration for '" + command + "', resolved from " + cfg.source()));
}

inline void prepare_out_dir(const std::filesystem::path& out_dir, const std::vector<std::string>& prefixes) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw IoError("cannot create output directory " + out_dir.string());
    // Stale snapshots from an earlier, longer run would otherwise join the trajectory.
    for (const auto& prefix : prefixes)
        for (const auto& p : list_snapshots(out_dir, prefix)) std::filesystem::remove(p);
}

inline Config load_config(const CommandOptions& opt) {
    if (opt.config.empty()) throw ConfigError("--config PATH is required");
    Config cfg = Config::load(opt.config);
    reject_unknown_keys(cfg);
    if (opt.seed) cfg.set("run.seed", std::to_string(*opt.seed));
    return cfg;
}

inline std::string describe_material(const Material& m) {
    const auto c = wave_speeds(m);
    return "rho " + format_double(m.rho()) + ", lambda " + format_double(m.lambda()) + ", mu " +
           format_double(m.mu()) + " (c_p " + format_double(c.c_p) + ", c_s " + format_double(c.c_s) + ")";
}

inline std::string describe_grid_exact(const Grid3& g) {
    std::string s = std::string(to_string(g.boundary())) + " " + std::to_string(g.n(0)) + "x" + std::to_string(g.n(1)) +
                    "x" + std::to_string(g.n(2)) + " spacing (";
    for (std::size_t a = 0; a < 3; ++a) s += (a ? ", " : "") + to_exact_string(g.d(a));
    s += ") origin (";
    for (std::size_t a = 0; a < 3; ++a) s += (a ? ", " : "") + to_exact_string(g.origin()[a]);
    return s + ")";
}
} // namespace detail

// ---------------------------------------------------------------------------
// simulate

inline int run_simulate(const CommandOptions& opt, std::ostream& out) {
    Config cfg = detail::load_config(opt);
    const Grid3 g = grid_from_config(cfg);
    const Material m = material_from_config(cfg);
    const double dt = resolve_dt(cfg, g, m);
    const long n_steps = cfg.get_int("time.n_steps");
    if (n_steps < 0) throw cfg.error("time.n_steps", "must be non-negative");
    const long every = cfg.get_int_in("time.record_every", 1, 1, 1L << 30);
    const std::uint64_t seed = cfg.get_uint64("run.seed", 1);
    const auto init = detail::initial_from_config(cfg, g, m, seed);

    // Everything is validated; only now touch the file system.
    detail::prepare_out_dir(opt.out_dir, {"u"});
    detail::echo_config(cfg, opt.out_dir, "simulate");

    const double snap_dt = dt * static_cast<double>(every);
    SimState s = initial_state(init.u, init.v, dt, m);
    std::ostringstream energy_csv;
    energy_csv << "step,t,kinetic,elastic,total\n";
    double e0 = 0.0, e_last = 0.0, worst = 0.0;
    std::size_t written = 0;
    auto record = [&](long n) {
        write_snapshot(opt.out_dir / snapshot_file_name("u", written), s.u_curr,
                       SnapshotTime{s.t, snap_dt, n});
        ++written;
        const Energy e = discrete_energy(s, m);
        if (n == 0) e0 = e.total();
        e_last = e.total();
        worst = std::max(worst, std::abs(e_last - e0));
        energy_csv << n << ',' << format_double(s.t) << ',' << format_double(e.kinetic) << ','
                   << format_double(e.elastic) << ',' << format_double(e.total()) << '\n';
    };
    record(0);
    for (long n = 1; n <= n_steps; ++n) {
        s = step(s, m);
        if (n % every == 0) record(n);
    }
    detail::write_text(opt.out_dir / "energy.csv", energy_csv.str());

    const double limit = cfl_max_dt(g, m);
    std::ostringstream sum;
    sum << "simulate: " << detail::describe_grid_exact(g) << '\n'
        << "material: " << detail::describe_material(m) << '\n'
        << "cfl: dt " << format_double(dt) << ", limit " << format_double(limit) << ", ratio "
        << format_double(dt / limit) << '\n'
        << "steps: " << n_steps << ", snapshots written: " << written << " (every " << every << " steps)\n"
        << "energy: initial " << format_double(e0) << ", final " << format_double(e_last) << ", max drift "
        << format_double(worst) << " absolute";
    if (e0 != 0.0) sum << ", " << format_double(worst / std::abs(e0)) << " relative";
    sum << '\n' << "mode: " << (opt.serial ? "serial (reference)" : "serial") << ", seed " << seed << '\n';
    detail::write_text(opt.out_dir / "summary.txt", sum.str());
    out << sum.str();
    return kExitOk;
}

// ---------------------------------------------------------------------------
// decompose

inline int run_decompose(const CommandOptions& opt, std::ostream& out) {
    Config cfg = detail::load_config(opt);
    const std::filesystem::path input = cfg.get_path("decompose.input");
    if (!std::filesystem::is_directory(input))
        throw cfg.error("decompose.input", "trajectory directory '" + input.string() + "' does not exist");
    cfg.set("decompose.input", std::filesystem::absolute(input).lexically_normal().string());
    const std::string prefix = cfg.get_string("decompose.prefix", "u");
    const Material m = material_from_config(cfg);

    const auto files = list_snapshots(input, prefix);
    if (files.empty())
        throw cfg.error("decompose.input", "no " + prefix + "_*.snap files in '" + input.string() + "'");
    const SnapshotHeader h0 = read_snapshot_header(files.front());
    if (h0.kind != "vector" || h0.dim != 3 || h0.components != 3)
        throw IoError(files.front().string() + ": decompose needs 3D vector snapshots");
    const Grid3 file_grid = h0.grid<3>();
    if (cfg.has_section("domain")) {
        const Grid3 cfg_grid = grid_from_config(cfg);
        if (!(cfg_grid == file_grid))
            throw ConfigError("grid mismatch: config '" + cfg.source() + "' declares " +
                              detail::describe_grid_exact(cfg_grid) + " but trajectory file '" +
                              files.front().string() + "' holds " + detail::describe_grid_exact(file_grid));
    }
    const VectorTrajectory u = read_vector_trajectory(input, prefix);
    if (u.size() < 3)
        throw cfg.error("decompose.input", "trajectory has " + std::to_string(u.size()) +
                                               " snapshots; decomposition needs at least 3");

    const Decomposition dec = decompose(u, m);

    detail::prepare_out_dir(opt.out_dir, {"v", "what"});
    detail::echo_config(cfg, opt.out_dir, "decompose");
    write_trajectory(opt.out_dir, "v", dec.v);
    write_trajectory(opt.out_dir, "what", dec.w_hat);
    std::ostringstream csv;
    csv << "t,div_v_rms,wave_res_scalar,wave_res_vector,harmonic_res,recon_err,endpoint\n";
    double recon = 0.0, div = 0.0, res_s = 0.0, res_v = 0.0, harm = 0.0;
    for (const auto& r : dec.diagnostics) {
        csv << format_double(r.t) << ',' << format_double(r.div_v_rms) << ',' << format_double(r.wave_res_scalar)
            << ',' << format_double(r.wave_res_vector) << ',' << format_double(r.harmonic_res) << ','
            << format_double(r.recon_err) << ',' << (r.endpoint ? "true" : "false") << '\n';
        recon = std::max(recon, r.recon_err);
        div = std::max(div, r.div_v_rms);
        if (!r.endpoint) {
            res_s = std::max(res_s, r.wave_res_scalar);
            res_v = std::max(res_v, r.wave_res_vector);
            harm = std::max(harm, r.harmonic_res);
        }
    }
    detail::write_text(opt.out_dir / "diagnostics.csv", csv.str());

    std::ostringstream sum;
    sum << "decompose: " << u.size() << " snapshots from " << input.string() << '\n'
        << "grid: " << detail::describe_grid_exact(file_grid) << '\n'
        << "material: " << detail::describe_material(m) << '\n'
        << "max reconstruction error " << format_double(recon) << " (max |u| " << format_double(dec.u_max) << ")\n"
        << "max rms div v " << format_double(div) << " (max rms div u " << format_double(dec.div_u_rms) << ")\n"
        << "interior max wave residuals: scalar " << format_double(res_s) << ", vector " << format_double(res_v)
        << ", harmonic " << format_double(harm) << '\n';
    detail::write_text(opt.out_dir / "summary.txt", sum.str());
    out << sum.str();
    return kExitOk;
}

// ---------------------------------------------------------------------------
// plate

namespace detail {
inline PlateConfig plate_config_from(Config& cfg, const Material& m) {
    const double a = cfg.get_positive("plate.a", 1.0);
    const double b = cfg.get_positive("plate.b", 1.0);
    const long n1 = cfg.get_int_in("plate.points1", 65, 4, 4097);
    const long n2 = cfg.get_int_in("plate.points2", n1, 4, 4097);
    const double h = cfg.get_positive("plate.thickness", 0.1);
    const Grid2 g({static_cast<int>(n1), static_cast<int>(n2)}, {a / (n1 - 1), b / (n2 - 1)}, Boundary::Dirichlet);
    return PlateConfig(g, h, m);
}

inline void write_curve(const std::filesystem::path& path, const std::vector<double>& k,
                        const std::vector<double>& omega) {
    std::ostringstream os;
    os << "k,omega\n";
    for (std::size_t i = 0; i < k.size(); ++i) os << format_double(k[i]) << ',' << format_double(omega[i]) << '\n';
    write_text(path, os.str());
}
} // namespace detail

inline int run_plate(const CommandOptions& opt, std::ostream& out) {
    Config cfg = detail::load_config(opt);
    const Material m = material_from_config(cfg);
    const PlateConfig pc = detail::plate_config_from(cfg, m);
    const double a = pc.grid.extent(0), b = pc.grid.extent(1);
    std::vector<std::array<int, 2>> modes;
    if (cfg.has("plate.modes")) {
        modes = parse_mode_list(cfg, "plate.modes");
    } else {
        const long mmax = cfg.get_int_in("plate.modes_max", 3, 0, 1000);
        for (int i = 1; i <= mmax; ++i)
            for (int j = 1; j <= mmax; ++j) modes.push_back({i, j});
    }
    const double kmax_default = std::numbers::pi * std::max(pc.grid.n(0), pc.grid.n(1)) / std::max(a, b);
    const double k_max = cfg.get_positive("plate.dispersion_k_max", kmax_default);
    const long npts = cfg.get_int_in("plate.dispersion_points", 101, 2, 1000000);
    const bool time_domain = cfg.get_bool("plate.time_domain", false);
    const double periods = cfg.get_positive("plate.periods", 4.0);
    for (const auto& [i, j] : modes)
        if (i > pc.grid.n(0) - 2 || j > pc.grid.n(1) - 2)
            throw cfg.error("plate.modes", "mode (" + std::to_string(i) + "," + std::to_string(j) +
                                               ") is not resolved by the plate grid");

    detail::prepare_out_dir(opt.out_dir, {});
    detail::echo_config(cfg, opt.out_dir, "plate");

    std::ostringstream sum;
    if (const auto w = pc.thickness_warning()) {
        sum << "warning: " << *w << "; thin-plate models lose accuracy\n";
    }
    const auto table = frequency_table(modes, a, b, pc);
    std::ostringstream csv;
    csv << "m,n,k,omega_KL,omega_w1,omega_V,ratio\n";
    for (const auto& r : table)
        csv << r.m << ',' << r.n << ',' << format_double(r.k) << ',' << format_double(r.omega_kl) << ','
            << format_double(r.omega_w1) << ',' << format_double(r.omega_V) << ',' << format_double(r.ratio) << '\n';
    detail::write_text(opt.out_dir / "frequencies.csv", csv.str());

    std::vector<double> ks(npts), kl(npts), w1(npts), V(npts);
    const auto c = wave_speeds(m);
    for (long i = 0; i < npts; ++i) {
        ks[i] = k_max * static_cast<double>(i) / static_cast<double>(npts - 1);
        kl[i] = kl_dispersion(ks[i], pc);
        w1[i] = c.c_p * ks[i];
        V[i] = c.c_s * ks[i];
    }
    detail::write_curve(opt.out_dir / "dispersion_kl.csv", ks, kl);
    detail::write_curve(opt.out_dir / "dispersion_w1.csv", ks, w1);
    detail::write_curve(opt.out_dir / "dispersion_V.csv", ks, V);

    sum << "plate: " << format_double(a) << " x " << format_double(b) << ", thickness " << format_double(pc.thickness)
        << ", " << pc.grid.n(0) << "x" << pc.grid.n(1) << " points\n"
        << "material: " << detail::describe_material(m) << '\n'
        << "modes: " << modes.size() << ", dispersion samples: " << npts << " up to k = " << format_double(k_max)
        << '\n';
    for (const auto& [label, speed] : {std::pair{"c_p", c.c_p}, std::pair{"c_s", c.c_s}}) {
        const auto kc = kl_crossover(speed, pc);
        sum << "bending curve meets omega = " << label << " k at "
            << (kc ? "k = " + format_double(*kc) : std::string("no finite k")) << '\n';
    }

    if (time_domain) {
        std::ostringstream meas;
        meas << "m,n,omega_KL,omega_KL_measured,omega_w1,omega_w1_measured,omega_V,omega_V_measured\n";
        for (const auto& r : table) {
            const double kl_m = run_kl_mode(pc, r.m, r.n, periods).omega;
            const double w1_m = run_membrane_mode(pc.grid, c.c_p, r.m, r.n, periods).omega;
            const double v_m = run_membrane_mode(pc.grid, c.c_s, r.m, r.n, periods).omega;
            meas << r.m << ',' << r.n << ',' << format_double(r.omega_kl) << ',' << format_double(kl_m) << ','
                 << format_double(r.omega_w1) << ',' << format_double(w1_m) << ',' << format_double(r.omega_V) << ','
                 << format_double(v_m) << '\n';
        }
        detail::write_text(opt.out_dir / "frequencies_measured.csv", meas.str());
        sum << "time-domain runs: " << table.size() << " modes, " << format_double(periods) << " periods each\n";
    }
    detail::write_text(opt.out_dir / "summary.txt", sum.str());
    out << sum.str();
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

inline SuiteOptions suite_options_from_config(Config& cfg) {
    SuiteOptions s;
    if (!cfg.has_section("material")) {
        cfg.set("material.rho", to_exact_string(s.material.rho()));
        cfg.set("material.lambda", to_exact_string(s.material.lambda()));
        cfg.set("material.mu", to_exact_string(s.material.mu()));
    }
    s.material = material_from_config(cfg);
    s.thresholds = thresholds_from_config(cfg);
    s.seed = cfg.get_uint64("run.seed", s.seed);
    s.base_n = static_cast<int>(cfg.get_int_in("verify.base_n", s.base_n, 8, 256));
    if (s.base_n % 2) throw cfg.error("verify.base_n", "must be even");
    s.energy_steps = static_cast<int>(cfg.get_int_in("verify.energy_steps", s.energy_steps, 1, 1000000));
    s.plate_a = cfg.get_positive("plate.a", s.plate_a);
    s.plate_b = cfg.get_positive("plate.b", s.plate_b);
    s.plate_points = static_cast<int>(cfg.get_int_in("plate.points1", s.plate_points, 8, 4097));
    s.plate_thickness = cfg.get_positive("plate.thickness", s.plate_thickness);
    if (cfg.has("plate.modes")) s.plate_modes = parse_mode_list(cfg, "plate.modes");
    return s;
}

inline int run_verify(const CommandOptions& opt, std::ostream& out) {
    Config cfg = detail::load_config(opt);
    std::string suite = opt.suite;
    if (suite.empty()) {
        if (!cfg.has("verify.suite"))
            throw ConfigError("verify needs a suite name (argument or verify.suite in '" + cfg.source() + "')");
        suite = cfg.get_string("verify.suite");
    }
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::string known;
        for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
        throw InputError("unknown verification suite '" + suite + "' (known: " + known + ")");
    }
    cfg.set("verify.suite", suite);
    const SuiteOptions so = suite_options_from_config(cfg);

    detail::prepare_out_dir(opt.out_dir, {});
    detail::echo_config(cfg, opt.out_dir, "verify");
    const auto reports = run_suite(suite, so);
    std::ostringstream sum;
    std::size_t failed = 0;
    for (const auto& r : reports) {
        std::ostringstream csv;
        r.write_csv(csv);
        detail::write_text(opt.out_dir / ("report_" + r.name() + ".csv"), csv.str());
        r.write_summary(sum);
        failed += r.failures();
    }
    sum << "verify " << suite << ": " << (failed ? "FAIL" : "PASS") << " (" << failed << " failed checks)\n";
    detail::write_text(opt.out_dir / "summary.txt", sum.str());
    out << sum.str();
    return failed ? kExitVerifyFailed : kExitOk;
}

// ---------------------------------------------------------------------------
// Dispatch

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"simulate", "decompose", "plate", "verify"};
    return names;
}

/// Runs a command and maps every failure to an exit code with one message on `err`.
inline int run_command(const std::string& command, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        if (command == "simulate") return run_simulate(opt, out);
        if (command == "decompose") return run_decompose(opt, out);
        if (command == "plate") return run_plate(opt, out);
        if (command == "verify") return run_verify(opt, out);
        err << "error: unknown command '" << command << "' (expected simulate|decompose|plate|verify)\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace lamekit
