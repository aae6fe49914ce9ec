#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "lamekit/verify.hpp"

using namespace lamekit;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<RefinementLevel> halving(double d0, double dt0, int count = 3) {
    std::vector<RefinementLevel> out;
    for (int i = 0; i < count; ++i) out.push_back({d0 / (1 << i), dt0 / (1 << i)});
    return out;
}

Grid3 slab(int n1) { return Grid3({n1, 4, 4}, {1.0 / n1, 0.25, 0.25}, Boundary::Periodic); }

/// Analytic traveling field sampled at times 0, dt, ..., (count-1) dt.
template <class Fn>
VectorTrajectory sampled(double dt, int count, Fn&& at_time) {
    VectorTrajectory tr(0.0, dt);
    for (int i = 0; i < count; ++i) tr.push_back(at_time(i * dt));
    return tr;
}
} // namespace

TEST(ConvergenceStudy, RecoversExactPowerLaw) {
    for (double p : {1.0, 2.0, 4.0}) {
        const auto r = convergence_study(halving(0.1, 0.01, 4), [&](const RefinementLevel& l) { return 3.0 * std::pow(l.d, p); });
        ASSERT_EQ(r.orders.size(), 3u);
        for (double o : r.orders) EXPECT_NEAR(o, p, 1e-12);
        EXPECT_TRUE(r.monotone);
        EXPECT_FALSE(r.at_floor);
        EXPECT_EQ(r.within(1.7, 2.3), p == 2.0);
    }
}

TEST(ConvergenceStudy, ValidatesLevels) {
    auto err = [](const RefinementLevel& l) { return l.d; };
    EXPECT_THROW(convergence_study(halving(0.1, 0.0, 2), err), InputError);
    EXPECT_THROW(convergence_study({{0.1}, {0.05}, {0.02}}, err), InputError);
    EXPECT_THROW(convergence_study({{0.1, 0.01}, {0.05, 0.01}, {0.025, 0.005}}, err), InputError);
    EXPECT_NO_THROW(convergence_study(halving(0.1, 0.0), err));
}

TEST(ConvergenceStudy, FloorAndNonMonotoneSequences) {
    const auto floor = convergence_study(halving(0.1, 0.0), [](const RefinementLevel&) { return 1e-15; });
    EXPECT_TRUE(floor.at_floor);
    EXPECT_TRUE(floor.orders.empty());
    EXPECT_TRUE(floor.within(1.7, 2.3));

    std::vector<double> errs{1e-3, 2e-3, 5e-4};
    int i = 0;
    const auto bumpy = convergence_study(halving(0.1, 0.0), [&](const RefinementLevel&) { return errs[i++]; });
    EXPECT_FALSE(bumpy.monotone);
    EXPECT_NEAR(bumpy.orders[0], -1.0, 1e-12);

    VerificationReport rep("study");
    append_convergence(rep, "bumpy", bumpy, Thresholds{});
    ASSERT_EQ(rep.rows().size(), 2u);
    EXPECT_FALSE(rep.rows()[0].pass);
    EXPECT_TRUE(rep.rows()[1].pass);
    EXPECT_NE(rep.rows()[0].note.find("non-monotone"), std::string::npos);
    VerificationReport rep2("floor");
    append_convergence(rep2, "exact", floor, Thresholds{});
    ASSERT_EQ(rep2.rows().size(), 1u);
    EXPECT_EQ(rep2.rows()[0].comparison, "max");
    EXPECT_TRUE(rep2.passed());
}

TEST(WaveSpeed, AnalyticPlaneWavesWithinHalfPercent) {
    const Material m = Material::from_lame(1.0, 2.0, 1.0);
    const auto c = wave_speeds(m);
    const Grid3 g = slab(64);
    const Vec3 k{2 * kPi, 0, 0};
    const double dt = 0.05;
    const auto p = sampled(dt, 8, [&](double t) { return plane_p_wave(g, k, 1.0, m, t); });
    EXPECT_NEAR(wave_speed_measure(p, 0), c.c_p, 0.005 * c.c_p);
    const auto s = sampled(dt, 8, [&](double t) { return plane_s_wave(g, k, {0, 0, 1}, 1.0, m, t); });
    EXPECT_NEAR(wave_speed_measure(s, 0), c.c_s, 0.005 * c.c_s);
    // Waves running toward -x report negative speed.
    const auto back = sampled(dt, 8, [&](double t) { return plane_p_wave(g, {-2 * kPi, 0, 0}, 1.0, m, t); });
    EXPECT_NEAR(wave_speed_measure(back, 0), -c.c_p, 0.005 * c.c_p);
}

TEST(WaveSpeed, LagAccumulatesBeyondHalfThePeriod) {
    // A non-sinusoidal profile translating 3.4 periods in total.
    const Grid3 g = slab(48);
    const double speed = 0.85, dt = 0.25;
    auto profile = [](double x) { return std::exp(std::cos(2 * kPi * x)); };
    const auto tr = sampled(dt, 17, [&](double t) {
        return VectorField3::sample(g, [&](const Vec3& x) { return Vec3{profile(x[0] - speed * t), 0.0, 0.0}; });
    });
    EXPECT_NEAR(wave_speed_measure(tr, 0), speed, 1e-3 * speed);
}

TEST(WaveSpeed, DegenerateInputs) {
    const Grid3 g = slab(32);
    const auto flat = sampled(0.1, 3, [&](double) { return VectorField3(g); });
    EXPECT_THROW(wave_speed_measure(flat, 0), NumericalError);
    const auto still = sampled(0.1, 3, [&](double) {
        return VectorField3::sample(g, [](const Vec3& x) { return Vec3{std::sin(2 * kPi * x[0]), 0, 0}; });
    });
    EXPECT_THROW(wave_speed_measure(still, 0), NumericalError);
    const Grid3 dir({8, 8, 8}, {1.0 / 7, 1.0 / 7, 1.0 / 7}, Boundary::Dirichlet);
    EXPECT_THROW(wave_speed_measure(sampled(0.1, 3, [&](double) { return VectorField3(dir); }), 0), InputError);
    EXPECT_THROW(wave_speed_measure(still, 3), InputError);
}

TEST(Frequency, ZeroCrossingsOfSampledCosine) {
    const double omega = 3.7, dt = 0.01;
    std::vector<double> s;
    for (int i = 0; i < 2000; ++i) s.push_back(2.5 * std::cos(omega * i * dt + 0.3));
    EXPECT_NEAR(measure_angular_frequency(s, dt), omega, 1e-5 * omega);
    std::vector<double> short_run(s.begin(), s.begin() + 50);
    EXPECT_THROW(measure_angular_frequency(short_run, dt), NumericalError);
}

TEST(Frequency, ModalAmplitudeProjectsOntoTheMode) {
    const Grid2 g({33, 17}, {1.0 / 32, 0.5 / 16}, Boundary::Dirichlet);
    const ScalarField2 phi = sine_mode(g, 2, 1);
    EXPECT_NEAR(phi.at({8, 8}), std::sin(2 * kPi * 0.25) * std::sin(kPi * 8 / 16.0), 1e-14);
    const ScalarField2 f = 3.0 * phi + 5.0 * sine_mode(g, 1, 3);
    EXPECT_NEAR(modal_amplitude(f, phi), 3.0, 1e-12);
}

TEST(Report, ComparisonsAndOutput) {
    VerificationReport rep("demo");
    rep.parameter("grid", "16^3");
    EXPECT_TRUE(rep.check_relative("speed", "P", 1.005, 1.0, 0.01).pass);
    EXPECT_FALSE(rep.check_relative("speed", "S", 1.02, 1.0, 0.01).pass);
    EXPECT_TRUE(rep.check_absolute("order", "", 2.2, 2.0, 0.3).pass);
    EXPECT_FALSE(rep.check_at_most("error", "", 2e-10, 1e-10).pass);
    rep.record("note, with comma", "", 0.1);
    EXPECT_EQ(rep.failures(), 2u);
    EXPECT_FALSE(rep.passed());

    std::ostringstream csv;
    rep.write_csv(csv);
    const std::string text = csv.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "report,quantity,params,measured,reference,tolerance,comparison,pass,note");
    EXPECT_NE(text.find("0.10000000000000001"), std::string::npos);
    EXPECT_NE(text.find("\"note, with comma\""), std::string::npos);

    std::ostringstream sum;
    rep.write_summary(sum);
    EXPECT_NE(sum.str().find("FAIL speed [S]"), std::string::npos);
    EXPECT_NE(sum.str().find("demo: 5 rows, 2 failed"), std::string::npos);

    VerificationReport all("all");
    all.merge(rep);
    EXPECT_EQ(all.rows().front().quantity, "demo/speed");
    EXPECT_EQ(all.failures(), 2u);
}

TEST(Suites, UnknownNameIsRejected) {
    EXPECT_THROW(run_suite("nope"), InputError);
    EXPECT_EQ(suite_names().back(), "all");
}

TEST(Suites, OperatorsSuitePassesOnDefaults) {
    const auto reports = run_suite("operators");
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_TRUE(reports[0].passed());
    for (const auto& r : reports[0].rows())
        if (r.quantity.find("order") != std::string::npos) {
            EXPECT_GE(r.measured, 1.7);
            EXPECT_LE(r.measured, 2.3);
        }
}

TEST(Suites, DecompositionSuiteOnMixedWaves) {
    const Material m = Material::from_lame(1.0, 0.4, 0.4);
    const VectorTrajectory u = mixed_wave_trajectory(16, 8, m);
    const VerificationReport rep = decomposition_suite(u, m, Thresholds{});
    EXPECT_TRUE(rep.passed());
}
