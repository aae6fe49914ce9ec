#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lamekit/plate.hpp"
#include "lamekit/verify.hpp"

using namespace lamekit;

namespace {
constexpr double kPi = std::numbers::pi;

Grid2 plate_grid(int n, double a = 1.0, double b = 1.0) {
    return Grid2({n, n}, {a / (n - 1), b / (n - 1)}, Boundary::Dirichlet);
}

PlateConfig plate(int n = 33, double h = 0.1, Material m = Material::from_lame(1.0, 1.0, 1.0)) {
    return PlateConfig(plate_grid(n), h, m);
}

/// Engineering constants recomputed from the Lamé pair, independent of Material.
double bending_oracle(double rho, double lambda, double mu, double h) {
    const double E = mu * (3 * lambda + 2 * mu) / (lambda + mu);
    const double s = lambda / (2 * (lambda + mu));
    return h * h / 12.0 * E / (rho * (1 - s * s));
}

/// Five-point Laplacian of a function with step e, Richardson-extrapolated.
template <class Fn>
double fd_laplacian(Fn&& f, double x, double y, double e) {
    auto lap = [&](double s) { return (f(x + s, y) + f(x - s, y) + f(x, y + s) + f(x, y - s) - 4 * f(x, y)) / (s * s); };
    return (4 * lap(e / 2) - lap(e)) / 3;
}
} // namespace

// The closed-form modal frequency is re-derived here: substituting
// G = phi(x) cos(omega t) into
//   -G_tt + (h^2/12) lap G_tt - D' lap lap G = 0
// gives omega^2 (phi - (h^2/12) lap phi) = D' lap lap phi, evaluated with
// finite differences of the sine mode at an interior point.
TEST(KirchhoffLove, ModalFrequencyMatchesSubstitutionIntoTheEquation) {
    const double rho = 2.0, lambda = 1.5, mu = 0.7, h = 0.08, a = 1.3, b = 0.9;
    const PlateConfig cfg(Grid2({33, 33}, {a / 32, b / 32}, Boundary::Dirichlet), h,
                          Material::from_lame(rho, lambda, mu));
    const double Dp = bending_oracle(rho, lambda, mu, h);
    EXPECT_NEAR(kl_bending_coefficient(cfg), Dp, 1e-14 * Dp);
    for (auto [m, n] : {std::pair{1, 1}, {2, 1}, {1, 3}, {3, 2}}) {
        auto phi = [&](double x, double y) { return std::sin(m * kPi * x / a) * std::sin(n * kPi * y / b); };
        auto lap_phi = [&](double x, double y) { return fd_laplacian(phi, x, y, 5e-3); };
        const double x = 0.21 * a, y = 0.37 * b, e = 1e-2;
        const double bilap = fd_laplacian(lap_phi, x, y, e);
        const double omega2 = Dp * bilap / (phi(x, y) - h * h / 12.0 * lap_phi(x, y));
        const double omega = kl_modal_frequency(m, n, a, b, cfg);
        EXPECT_NEAR(omega, std::sqrt(omega2), 2e-6 * omega) << m << "," << n;
    }
}

TEST(KirchhoffLove, ModalFrequencyExamples) {
    const PlateConfig cfg = plate();
    EXPECT_THROW(kl_modal_frequency(0, 1, 1, 1, cfg), InputError);
    EXPECT_THROW(kl_modal_frequency(1, 1, -1, 1, cfg), InputError);
    // Square plate symmetry and agreement with the dispersion curve.
    EXPECT_DOUBLE_EQ(kl_modal_frequency(1, 2, 1, 1, cfg), kl_modal_frequency(2, 1, 1, 1, cfg));
    EXPECT_NEAR(kl_modal_frequency(2, 3, 1, 1, cfg), kl_dispersion(std::hypot(2 * kPi, 3 * kPi), cfg), 1e-12);
}

TEST(KirchhoffLove, RotaryInertiaVanishesForThinPlates) {
    for (double h : {0.1, 0.01, 0.001}) {
        const PlateConfig cfg = plate(33, h);
        const double full = kl_modal_frequency(2, 2, 1, 1, cfg), thin = kl_thin_plate_frequency(2, 2, 1, 1, cfg);
        EXPECT_LT(full, thin);
        const double k2 = 8 * kPi * kPi;
        EXPECT_NEAR(full / thin, 1 / std::sqrt(1 + h * h * k2 / 12), 1e-14);
    }
}

TEST(KirchhoffLove, CrossoverSolvesTheMatchingCondition) {
    const PlateConfig cfg = plate(33, 0.1);
    const double c = 1.0;
    const auto kc = kl_crossover(c, cfg);
    ASSERT_TRUE(kc.has_value());
    EXPECT_NEAR(kl_dispersion(*kc, cfg), c * *kc, 1e-10 * c * *kc);
    // The bending curve saturates at sqrt(12 D')/h, so faster lines never meet it.
    const double ceiling = std::sqrt(12 * kl_bending_coefficient(cfg)) / cfg.thickness;
    EXPECT_FALSE(kl_crossover(1.01 * ceiling, cfg).has_value());
}

TEST(KirchhoffLove, StepIsLinear) {
    const PlateConfig cfg = plate(17);
    const double dt = 0.5 * kl_max_dt(cfg);
    const ScalarField2 f = smooth_plate_data(cfg.grid, 3), g = sine_mode(cfg.grid, 2, 3);
    const KLState a = kl_initial(f, g, dt, cfg), b = kl_initial(g, f, dt, cfg);
    const KLState combo = kl_initial(2.0 * f - 3.0 * g, 2.0 * g - 3.0 * f, dt, cfg);
    const KLState sa = kl_step(a, cfg), sb = kl_step(b, cfg), sc = kl_step(combo, cfg);
    const ScalarField2 expect = 2.0 * sa.curr - 3.0 * sb.curr;
    for (std::size_t i = 0; i < expect.grid().size(); ++i) EXPECT_NEAR(sc.curr[i], expect[i], 1e-12);
}

TEST(KirchhoffLove, RefusesStepsAboveTheModalLimit) {
    const PlateConfig cfg = plate(17);
    const ScalarField2 f = smooth_plate_data(cfg.grid, 2);
    const KLState s = kl_initial(f, ScalarField2(cfg.grid), 1.01 * kl_max_dt(cfg), cfg);
    EXPECT_THROW(kl_step(s, cfg), NumericalError);
    EXPECT_THROW(kl_max_dt(PlateConfig(Grid2({9, 9}, {0.125, 0.125}, Boundary::Periodic), 0.1,
                                       Material::from_lame(1, 1, 1))),
                 InputError);
}

TEST(KirchhoffLove, TimeDomainModesMatchClosedForm) {
    const PlateConfig cfg = plate(33);
    for (auto [m, n] : {std::pair{1, 1}, {1, 2}, {2, 2}, {3, 1}, {2, 3}}) {
        const ModeRun run = run_kl_mode(cfg, m, n, 3.0, 300.0);
        const double ref = kl_modal_frequency(m, n, 1, 1, cfg);
        EXPECT_NEAR(run.omega, ref, 1e-3 * ref) << m << "," << n;
    }
}

TEST(KirchhoffLove, EnergyIsConserved) {
    const PlateConfig cfg = plate(17);
    const double dt = kl_max_dt(cfg);
    const KLState s = kl_initial(smooth_plate_data(cfg.grid, 4), ScalarField2(cfg.grid), dt, cfg);
    const double drift = max_energy_drift(
        s, 500, [&](const KLState& x) { return kl_step(x, cfg); }, [&](const KLState& x) { return kl_energy(x, cfg); });
    EXPECT_LT(drift, 1e-10);
}

TEST(Membrane, StandingModeMatchesDiscreteDispersion) {
    // Oracle: the leapfrog/five-point scheme advances a sine mode as cos(omega_h t)
    // with sin(omega_h dt / 2) = (c dt / 2) sqrt(lambda_h).
    const Grid2 g = plate_grid(33);
    for (double c : {1.0, 1.7}) {
        for (auto [m, n] : {std::pair{1, 1}, {2, 3}}) {
            const ModeRun run = run_membrane_mode(g, c, m, n, 4.0, 0.5);
            const double d = g.d(0);
            const double lam = 4 / (d * d) * (std::pow(std::sin(m * kPi * d / 2), 2) + std::pow(std::sin(n * kPi * d / 2), 2));
            const double omega_h = 2 / run.dt * std::asin(0.5 * c * run.dt * std::sqrt(lam));
            EXPECT_NEAR(run.omega, omega_h, 1e-5 * omega_h);
            const double omega = c * std::hypot(m * kPi, n * kPi);
            EXPECT_NEAR(run.omega, omega, 0.01 * omega);
        }
    }
}

TEST(Membrane, EnergyIsConservedAndStepRefusesLargeDt) {
    const Grid2 g = plate_grid(33);
    const double c = 1.3, dt = wave2_max_dt(g, c);
    const Wave2State s = wave2_initial(smooth_plate_data(g, 4), ScalarField2(g), dt, c);
    const double drift = max_energy_drift(
        s, 1000, [&](const Wave2State& x) { return step_wave2(x, c); },
        [&](const Wave2State& x) { return wave2_energy(x, c); });
    EXPECT_LT(drift, 1e-11);
    const Wave2State big = wave2_initial(smooth_plate_data(g, 2), ScalarField2(g), 1.01 * dt, c);
    EXPECT_THROW(step_wave2(big, c), NumericalError);
}

TEST(Membrane, SpeedsComeFromTheMaterial) {
    const PlateConfig cfg = plate(17, 0.1, Material::from_lame(2.0, 3.0, 0.5));
    EXPECT_DOUBLE_EQ(plate_p_speed(cfg), std::sqrt((3.0 + 1.0) / 2.0));
    EXPECT_DOUBLE_EQ(plate_s_speed(cfg), std::sqrt(0.25));
}

TEST(StaticPotential, ReproducesDiscreteHarmonicPolynomials) {
    const Grid2 g = plate_grid(21);
    // x^2 - y^2 and x y are annihilated exactly by the five-point Laplacian.
    for (int which = 0; which < 2; ++which) {
        const ScalarField2 exact = ScalarField2::sample(g, [&](const std::array<double, 2>& x) {
            return which == 0 ? x[0] * x[0] - x[1] * x[1] : x[0] * x[1];
        });
        ScalarField2 bc(g);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.on_boundary(g.multi(i))) bc[i] = exact[i];
        PoissonOptions opt;
        opt.rel_tol = 1e-12;
        const ScalarField2 w0 = solve_w0(bc, opt);
        for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(w0[i], exact[i], 1e-9);
    }
}

TEST(StaticPotential, ZeroBoundaryGivesZero) {
    const Grid2 g = plate_grid(9);
    const ScalarField2 w0 = solve_w0(ScalarField2(g));
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(w0[i], 0.0);
}

TEST(StreamVelocity, IsDivergenceFreeAndRotatesTheGradient) {
    const Grid2 g({32, 32}, {1.0 / 32, 1.0 / 32}, Boundary::Periodic);
    const ScalarField2 V = ScalarField2::sample(
        g, [](const std::array<double, 2>& x) { return std::sin(2 * kPi * x[0]) * std::cos(4 * kPi * x[1]); });
    const PlaneVectorField u = stream_velocity(V);
    const ScalarField2 div = diff1(u[0], 0) + diff1(u[1], 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(div[i], 0.0, 1e-11);
        EXPECT_EQ(u[2][i], 0.0);
    }
    // Central differences of a Fourier mode: derivative times sin(kd)/(kd).
    const double d = 1.0 / 32;
    const ScalarField2 exact1 = ScalarField2::sample(g, [&](const std::array<double, 2>& x) {
        return -std::sin(2 * kPi * x[0]) * std::sin(4 * kPi * x[1]) * std::sin(4 * kPi * d) / d;
    });
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(u[0][i], exact1[i], 1e-10);
}

TEST(AssembleDisplacement, CombinesTheThroughThicknessTerms) {
    const PlateConfig cfg = plate(17, 0.2);
    const Grid2& g = cfg.grid;
    const ScalarField2 f = smooth_plate_data(g, 2);
    const ScalarField2 zero(g);
    PlateState p{zero, wave2_initial(f, zero, 0.01, 1.0), wave2_initial(zero, zero, 0.01, 1.0),
                 wave2_initial(zero, zero, 0.01, 1.0)};
    const double x3 = 0.05;
    const PlaneVectorField u = assemble_displacement(p, cfg, x3);
    const ScalarField2 d1 = diff1(f, 0), d2 = diff1(f, 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(u[0][i], x3 * d1[i], 1e-14);
        EXPECT_NEAR(u[1][i], x3 * d2[i], 1e-14);
        EXPECT_EQ(u[2][i], f[i]);
    }
    // Stream function contributions add the rotated gradient.
    p.V1 = wave2_initial(f, zero, 0.01, 1.0);
    const PlaneVectorField u2 = assemble_displacement(p, cfg, x3);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(u2[0][i], x3 * (d1[i] + d2[i]), 1e-13);
    EXPECT_THROW(assemble_displacement(p, cfg, 0.11), InputError);
}

TEST(PlateConfigChecks, ThicknessWarningThreshold) {
    EXPECT_FALSE(plate(17, 0.2).thickness_warning().has_value());
    EXPECT_TRUE(plate(17, 0.25).thickness_warning().has_value());
    EXPECT_THROW(plate(17, 0.0), InputError);
}

TEST(FrequencyTable, RowsFollowTheModeList) {
    const Material m = Material::from_lame(1.0, 2.0, 1.0);
    const PlateConfig cfg = plate(17, 0.1, m);
    EXPECT_TRUE(frequency_table({}, 1, 1, cfg).empty());
    const auto rows = frequency_table({{1, 1}, {2, 3}}, 1, 2, cfg);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].m, 2);
    EXPECT_EQ(rows[1].n, 3);
    EXPECT_NEAR(rows[1].k, std::hypot(2 * kPi, 1.5 * kPi), 1e-12);
    EXPECT_NEAR(rows[1].omega_w1, 2.0 * rows[1].k, 1e-12);
    EXPECT_NEAR(rows[1].omega_V, rows[1].k, 1e-12);
    EXPECT_NEAR(rows[0].ratio, 2.0, 1e-14);
}
