#include "wavetank/spectral_grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace wavetank;

namespace {

constexpr double pi = std::numbers::pi;

TankConfig tank1(int n) {
    TankConfig c;
    c.d = 1;
    c.L1 = 2.0;
    c.n1 = n;
    c.nz = 16;
    return c;
}

TankConfig tank2(int n1, int n2) {
    TankConfig c;
    c.d = 2;
    c.L1 = 2.0;
    c.L2 = 1.5;
    c.n1 = n1;
    c.n2 = n2;
    c.nz = 16;
    return c;
}

}  // namespace

TEST(TankConfig, RejectsBadValues) {
    TankConfig c = tank1(32);
    EXPECT_NO_THROW(c.validate());
    c.h = -1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = tank1(32);
    c.d = 3;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = tank1(32);
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Grid, NodesAndWeights) {
    Grid g(tank1(16));
    ASSERT_EQ(g.nx1(), 17u);
    EXPECT_DOUBLE_EQ(g.x1().front(), 0.0);
    EXPECT_DOUBLE_EQ(g.x1().back(), 2.0);
    EXPECT_NEAR(g.k1()[3], 3 * pi / 2.0, 1e-14);
    EXPECT_NEAR(integrate_Q(g, g.constant(1.0)), 2.0, 1e-14);
    EXPECT_NEAR(g.z().front(), 0.0, 0.0);
    EXPECT_NEAR(g.z().back(), -1.0, 0.0);
    double wz = 0.0;
    for (double w : g.wz()) wz += w;
    EXPECT_NEAR(wz, 1.0, 1e-14);
}

TEST(Grid, QuadratureOfCosineSquared) {
    // int_0^L cos^2(pi p x / L) dx = L / 2 for 0 < p < n
    Grid g(tank1(32));
    for (int p : {1, 5, 17, 31}) {
        Field f = g.sample([&](double x, double) { return std::pow(std::cos(pi * p * x / 2.0), 2); });
        EXPECT_NEAR(integrate_Q(g, f), 1.0, 1e-13) << p;
    }
}

TEST(Grid, QuadratureTwoDimensional) {
    Grid g(tank2(16, 8));
    EXPECT_NEAR(g.area(), 3.0, 1e-14);
    Field f = g.sample([](double x, double y) {
        return 1.0 + std::cos(pi * x / 2.0) * std::cos(2 * pi * y / 1.5);
    });
    EXPECT_NEAR(integrate_Q(g, f), 3.0, 1e-13);
    // int_0^2 x^2 (2 - x)^2 dx = 32/30; the even extension is only C^2, so
    // the trapezoid rule is merely high order here.
    Field q = g.sample([](double x, double) { return x * x * (2.0 - x) * (2.0 - x); });
    EXPECT_NEAR(integrate_Q(g, q), 1.5 * 32.0 / 30.0, 2e-3);
}

TEST(Transform, RoundTrip) {
    Grid g(tank2(16, 8));
    Field f = g.sample([](double x, double y) { return std::exp(std::cos(x) + 0.3 * y * y); });
    Field back = synthesize(g, analyze(g, f));
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(back[i], f[i], 1e-13);
}

TEST(Transform, CosineModeIsolated) {
    Grid g(tank2(16, 8));
    Field f = g.sample([](double x, double y) { return std::cos(3 * pi * x / 2.0) * std::cos(2 * pi * y / 1.5); });
    Field c = analyze(g, f);
    for (std::size_t p = 0; p < g.nx1(); ++p)
        for (std::size_t q = 0; q < g.nx2(); ++q)
            EXPECT_NEAR(c[g.index(p, q)], (p == 3 && q == 2) ? 1.0 : 0.0, 1e-13);
}

TEST(Derivative, CosineToSineAndBack) {
    Grid g(tank1(32));
    const double k = 4 * pi / 2.0;
    Field f = g.sample([&](double x, double) { return std::cos(k * x); });
    Field df = diff(g, f, 0);
    Field d2f = diff(g, df, 0, Parity::Odd);
    for (std::size_t i = 0; i < g.nx1(); ++i) {
        EXPECT_NEAR(df[i], -k * std::sin(k * g.x1()[i]), 1e-11);
        EXPECT_NEAR(d2f[i], -k * k * std::cos(k * g.x1()[i]), 1e-10);
    }
}

TEST(Derivative, SmoothEvenFieldSpectralAccuracy) {
    // f = exp(cos(pi x / L)) is smooth and even about both walls.
    Grid g(tank1(32));
    const double a = pi / 2.0;
    Field f = g.sample([&](double x, double) { return std::exp(std::cos(a * x)); });
    Field df = diff(g, f, 0);
    for (std::size_t i = 0; i < g.nx1(); ++i) {
        const double x = g.x1()[i];
        EXPECT_NEAR(df[i], -a * std::sin(a * x) * std::exp(std::cos(a * x)), 1e-12);
    }
}

TEST(Derivative, GradientAndDivergence2D) {
    Grid g(tank2(16, 16));
    auto f = [](double x, double y) { return std::cos(pi * x / 2.0) * std::cos(pi * y / 1.5); };
    Field v = g.sample(f);
    VectorField gr = gradient(g, v);
    Field lap = divergence(g, gr);
    const double k2 = std::pow(pi / 2.0, 2) + std::pow(pi / 1.5, 2);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(lap[i], -k2 * v[i], 1e-11);
    EXPECT_NEAR(g.laplace_symbol(1, 1), k2, 1e-12);
    EXPECT_EQ(g.laplace_symbol(16, 0), 0.0);
}

TEST(EvenExtension, ReflectsAndWraps) {
    Grid g(tank1(8));
    Field v = g.sample([](double x, double) { return x; });
    EvenExtension e = even_extend(g, v);
    EXPECT_EQ(e.period1(), 16u);
    EXPECT_DOUBLE_EQ(e.at(3), v[3]);
    EXPECT_DOUBLE_EQ(e.at(-3), v[3]);
    EXPECT_DOUBLE_EQ(e.at(13), v[3]);
    EXPECT_DOUBLE_EQ(e.at(16 + 5), v[5]);
    Field r = e.restrict();
    EXPECT_EQ(r, v);
    EXPECT_EQ(e.periodic_values().size(), 16u);
}

TEST(Dealias, RemovesHighModesOnly) {
    Grid g(tank1(32));
    Field lo = g.sample([](double x, double) { return std::cos(3 * pi * x / 2.0); });
    Field hi = g.sample([](double x, double) { return std::cos(25 * pi * x / 2.0); });
    Field out = dealias(g, lo + hi);
    for (std::size_t i = 0; i < lo.size(); ++i) EXPECT_NEAR(out[i], lo[i], 1e-13);
}

TEST(Helpers, MeanAndNorms) {
    Grid g(tank1(16));
    Field f = g.sample([](double x, double) { return 2.0 + std::cos(pi * x / 2.0); });
    Field m = remove_mean(g, f);
    EXPECT_NEAR(integrate_Q(g, m), 0.0, 1e-14);
    EXPECT_NEAR(max_abs(m), 1.0, 1e-14);
    VectorField v{g.constant(3.0), {}};
    EXPECT_NEAR(max_norm(g, v), 3.0, 0.0);
    EXPECT_NEAR(l2_norm(g, v), 3.0 * std::sqrt(2.0), 1e-14);
}

TEST(Quadrature, MomentOfOddField) {
    // int_0^2 x sin(pi x / 2) dx = 4 / pi
    Grid g(tank1(32));
    Field s1 = g.sample([](double x, double) { return std::sin(pi * x / 2.0); });
    EXPECT_NEAR(integrate_moment(g, s1, 0), 4.0 / pi, 1e-14);
    // A smooth odd field with no closed-form sine series: x d/dx of exp(cos(pi x / 2)).
    // int_0^L x f'(x) dx = L f(L) - int f.
    Field f = g.sample([](double x, double) { return std::exp(std::cos(pi * x / 2.0)); });
    Field df = diff(g, f, 0);
    const double exact = 2.0 * std::exp(-1.0) - integrate_Q(g, f);
    EXPECT_NEAR(integrate_moment(g, df, 0), exact, 1e-13);

    Grid g2(tank2(16, 16));
    Field h = g2.sample([](double x, double y) { return std::sin(pi * y / 1.5) * (1.0 + std::cos(pi * x / 2.0)); });
    // int_0^2 (1 + cos) dx = 2, int_0^1.5 y sin(pi y / 1.5) dy = 1.5^2 / pi
    EXPECT_NEAR(integrate_moment(g2, h, 1), 2.0 * 1.5 * 1.5 / pi, 1e-13);
}
