#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "lamekit/operators.hpp"

using namespace lamekit;

namespace {

constexpr double kPi = std::numbers::pi;

Grid3 cube(int n, Boundary b, double L = 1.0) {
    const double d = b == Boundary::Periodic ? L / n : L / (n - 1);
    return Grid3({n, n, n}, {d, d, d}, b);
}

ScalarField3 random_field(const Grid3& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField3 f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
    return f;
}

double max_abs_diff(const ScalarField3& a, const ScalarField3& b) {
    return field_norms(a - b).max_abs;
}

} // namespace

TEST(Grid, RejectsTooFewPointsAndBadSpacing) {
    EXPECT_THROW(Grid3({3, 8, 8}, {0.1, 0.1, 0.1}), InputError);
    EXPECT_THROW(Grid3({8, 8, 8}, {0.1, 0.0, 0.1}), InputError);
    EXPECT_THROW(Grid3({8, 8, 8}, {0.1, -1.0, 0.1}), InputError);
    EXPECT_NO_THROW(Grid3({4, 4, 4}, {0.1, 0.1, 0.1}));
}

TEST(Grid, LinearOrderIsAxisOneFastest) {
    Grid3 g({5, 6, 7}, {1, 1, 1});
    EXPECT_EQ(g.linear({1, 0, 0}), 1u);
    EXPECT_EQ(g.linear({0, 1, 0}), 5u);
    EXPECT_EQ(g.linear({0, 0, 1}), 30u);
    for (std::size_t i : {0u, 17u, 123u, 209u}) EXPECT_EQ(g.linear(g.multi(i)), i);
}

TEST(Gradient, ConstantGivesZero) {
    for (auto b : {Boundary::Periodic, Boundary::Dirichlet}) {
        ScalarField3 f(cube(8, b), 3.25);
        const auto gr = gradient(f);
        EXPECT_EQ(field_norms(gr).max_abs, 0.0);
    }
}

TEST(Gradient, LinearExactIncludingDirichletEdges) {
    const Grid3 g = cube(9, Boundary::Dirichlet);
    const auto f = ScalarField3::sample(g, [](auto x) { return x[0]; });
    const auto gr = gradient(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(gr[0][i], 1.0, 1e-12);
        EXPECT_NEAR(gr[1][i], 0.0, 1e-12);
        EXPECT_NEAR(gr[2][i], 0.0, 1e-12);
    }
}

TEST(Gradient, RejectsNonFinite) {
    ScalarField3 f(cube(6, Boundary::Periodic));
    f[7] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(gradient(f), InputError);
    EXPECT_THROW(laplacian(f), InputError);
    f[7] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(divergence(VectorField3({f, f, f})), InputError);
}

TEST(Gradient, SecondOrderOnPeriodicSine) {
    // Oracle: analytic derivative (2 pi/L) cos(2 pi x/L); errors on three levels.
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        Grid3 g({n, 4, 4}, {1.0 / n, 0.25, 0.25});
        const auto f = ScalarField3::sample(g, [](auto x) { return std::sin(2 * kPi * x[0]); });
        const auto exact = ScalarField3::sample(g, [](auto x) { return 2 * kPi * std::cos(2 * kPi * x[0]); });
        const double err = max_abs_diff(gradient(f)[0], exact);
        // Leading term of the central difference: k^3 d^2 / 6.
        EXPECT_NEAR(err, std::pow(2 * kPi, 3) / 6.0 / (n * n), 0.02 * err);
        if (prev > 0.0) {
            EXPECT_GT(prev / err, 3.5);
            EXPECT_LT(prev / err, 4.5);
        }
        prev = err;
    }
}

TEST(Divergence, IdentityFieldGivesThree) {
    for (auto b : {Boundary::Periodic, Boundary::Dirichlet}) {
        const Grid3 g = cube(8, b);
        const auto v = VectorField3::sample(g, [](auto x) { return x; });
        const auto div = divergence(v);
        // periodic wrap breaks linearity at the seam: check points 1 away from faces
        EXPECT_NEAR(field_norms(div - ScalarField3(g, 3.0), 1).max_abs, 0.0, 1e-12);
        if (b == Boundary::Dirichlet) {
            EXPECT_NEAR(field_norms(div - ScalarField3(g, 3.0)).max_abs, 0.0, 1e-12);
        }
    }
    const Grid3 g = cube(6, Boundary::Periodic);
    EXPECT_EQ(field_norms(divergence(VectorField3(g))).max_abs, 0.0);
}

TEST(Divergence, StreamFormFieldIsDiscretelyDivergenceFree) {
    const Grid3 g = cube(24, Boundary::Periodic);
    const auto s = ScalarField3::sample(g, [](auto x) { return std::sin(2 * kPi * x[0]) * std::sin(2 * kPi * x[1]); });
    VectorField3 v(g);
    v[0] = diff1(s, 1);
    v[1] = diff1(s, 0);
    v[1] *= -1.0;
    // Entries of v are O(2 pi); machine precision relative to that scale.
    EXPECT_LT(field_norms(divergence(v)).max_abs, 1e-12 * field_norms(v).max_abs / g.d(0));
}

TEST(Laplacian, QuadraticAndHarmonicExact) {
    const Grid3 g = cube(9, Boundary::Dirichlet);
    const auto q = ScalarField3::sample(g, [](auto x) { return x[0] * x[0]; });
    EXPECT_NEAR(field_norms(laplacian(q) - ScalarField3(g, 2.0), 1).max_abs, 0.0, 1e-10);
    // one-sided boundary formula is exact for quadratics too
    EXPECT_NEAR(field_norms(laplacian(q) - ScalarField3(g, 2.0)).max_abs, 0.0, 1e-10);
    const auto h = ScalarField3::sample(g, [](auto x) { return x[0] * x[1]; });
    EXPECT_NEAR(field_norms(laplacian(h), 1).max_abs, 0.0, 1e-11);
}

TEST(Laplacian, EigenfunctionConvergesAtSecondOrder) {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        Grid3 g({n, 4, 4}, {1.0 / n, 0.25, 0.25});
        const auto f = ScalarField3::sample(g, [](auto x) { return std::sin(2 * kPi * x[0]); });
        ScalarField3 exact = f;
        exact *= -(2 * kPi) * (2 * kPi);
        const double err = max_abs_diff(laplacian(f), exact);
        if (prev > 0.0) {
            EXPECT_GT(prev / err, 3.5);
            EXPECT_LT(prev / err, 4.5);
        }
        prev = err;
    }
}

// The compact Laplacian and div(grad) differ: div_grad is the step-2d stencil.
TEST(Laplacian, DivGradIsTheWideStencilAndAgreesToSecondOrder) {
    const Grid3 g = cube(12, Boundary::Periodic);
    const ScalarField3 f = random_field(g, 7);
    const ScalarField3 dg = div_grad(f);
    ScalarField3 wide(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.multi(i);
        double s = 0.0;
        for (std::size_t a = 0; a < 3; ++a) {
            auto p = idx, m = idx;
            p[a] = (idx[a] + 2) % g.n(a);
            m[a] = (idx[a] - 2 + g.n(a)) % g.n(a);
            s += (f.at(p) - 2 * f.at(idx) + f.at(m)) / (4 * g.d(a) * g.d(a));
        }
        wide[i] = s;
    }
    EXPECT_LT(max_abs_diff(dg, wide), 1e-10 * field_norms(wide).max_abs);

    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        Grid3 h({n, 4, 4}, {1.0 / n, 0.25, 0.25});
        const auto s = ScalarField3::sample(h, [](auto x) { return std::sin(2 * kPi * x[0]); });
        const double gap = max_abs_diff(div_grad(s), laplacian(s));
        if (prev > 0.0) {
            EXPECT_NEAR(prev / gap, 4.0, 0.5);
        }
        prev = gap;
    }
}

TEST(Operators, LinearityProperty) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (auto b : {Boundary::Periodic, Boundary::Dirichlet}) {
            const Grid3 g = cube(7, b);
            const ScalarField3 f = random_field(g, seed), h = random_field(g, seed + 100);
            const double a = 0.3 * seed, c = -1.7;
            const ScalarField3 combo = a * f + c * h;

            const auto lhs_l = laplacian(combo);
            const auto rhs_l = a * laplacian(f) + c * laplacian(h);
            const double scale = field_norms(rhs_l).max_abs;
            EXPECT_LT(max_abs_diff(lhs_l, rhs_l), 1e-13 * scale);

            const auto lhs_g = gradient(combo);
            const auto rhs_g = a * gradient(f) + c * gradient(h);
            EXPECT_LT(field_norms(lhs_g - rhs_g).max_abs, 1e-13 * field_norms(rhs_g).max_abs);

            const VectorField3 vf({f, h, f}), vh({h, f, combo});
            const auto lhs_d = divergence(a * vf + c * vh);
            const auto rhs_d = a * divergence(vf) + c * divergence(vh);
            EXPECT_LT(max_abs_diff(lhs_d, rhs_d), 1e-13 * field_norms(rhs_d).max_abs);
        }
    }
}

TEST(Operators, CurlOfGradientVanishes) {
    const Grid3 g = cube(10, Boundary::Periodic);
    const ScalarField3 f = random_field(g, 3);
    const auto c = curl(gradient(f));
    EXPECT_LT(field_norms(c).max_abs, 1e-12 * field_norms(gradient(f)).max_abs / g.d(0));
}

TEST(Operators, TwoDimensionalStencils) {
    Grid2 g({8, 8}, {0.125, 0.125}, Boundary::Dirichlet);
    const auto f = ScalarField2::sample(g, [](auto x) { return x[0] * x[1]; });
    EXPECT_NEAR(field_norms(laplacian(f)).max_abs, 0.0, 1e-11);
    const auto gr = gradient(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(g.multi(i));
        EXPECT_NEAR(gr[0][i], x[1], 1e-12);
        EXPECT_NEAR(gr[1][i], x[0], 1e-12);
    }
}

TEST(FieldNorms, Definitions) {
    const Grid3 g = cube(5, Boundary::Periodic);
    ScalarField3 z(g);
    auto n0 = field_norms(z);
    EXPECT_EQ(n0.max_abs, 0.0);
    EXPECT_EQ(n0.rms, 0.0);

    z[11] = 2.0;
    const auto n1 = field_norms(z);
    EXPECT_DOUBLE_EQ(n1.max_abs, 2.0);
    EXPECT_DOUBLE_EQ(n1.rms, 2.0 / std::sqrt(static_cast<double>(g.size())));

    const auto nc = field_norms(ScalarField3(g, -1.5));
    EXPECT_DOUBLE_EQ(nc.max_abs, 1.5);
    EXPECT_DOUBLE_EQ(nc.rms, 1.5);

    // vector fields use the pointwise magnitude
    VectorField3 v(g);
    v[0][0] = 3.0;
    v[1][0] = 4.0;
    EXPECT_DOUBLE_EQ(field_norms(v).max_abs, 5.0);
}

TEST(Fields, MismatchedGridsRejected) {
    ScalarField3 a(cube(5, Boundary::Periodic)), b(cube(6, Boundary::Periodic));
    EXPECT_THROW(a += b, InputError);
    EXPECT_THROW(ScalarField3(cube(5, Boundary::Periodic), std::vector<double>(3)), InputError);
}
