#include "wavetank/identities.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace wavetank;

namespace {

constexpr double pi = std::numbers::pi;

TankConfig tank(int n = 32, int nz = 32) {
    TankConfig c;
    c.n1 = n;
    c.nz = nz;
    return c;
}

SurfaceState wavy(const Grid& g, double a) {
    Field eta = g.sample([&](double x, double) { return a * (std::cos(pi * x) + 0.5 * std::cos(2 * pi * x)); });
    Field psi = g.sample([&](double x, double) { return a * (std::cos(2 * pi * x) - 0.7 * std::cos(3 * pi * x)); });
    return {eta, psi, 0.0};
}

}  // namespace

TEST(Simpson, ExactForCubics) {
    auto cubic = [](double t) { return 1.0 - 2.0 * t + 3.0 * t * t - t * t * t; };
    auto exact = [](double T) { return T - T * T + T * T * T - 0.25 * T * T * T * T; };
    for (int n : {2, 3, 4, 5, 7, 10}) {
        const double dt = 0.3;
        std::vector<double> f;
        for (int i = 0; i <= n; ++i) f.push_back(cubic(i * dt));
        EXPECT_NEAR(simpson(f, dt), exact(n * dt), 1e-12) << n;
    }
}

TEST(Simpson, DegenerateLengths) {
    EXPECT_EQ(simpson({}, 1.0), 0.0);
    EXPECT_EQ(simpson({4.0}, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(simpson({1.0, 3.0}, 0.5), 1.0);
}

TEST(Corner, FormulaValues) {
    EXPECT_DOUBLE_EQ(corner_theta(9.81, 0.0, 5.0), 0.0);
    EXPECT_DOUBLE_EQ(corner_theta(2.0, 3.0, 1.0), 7.5);
}

TEST(Corner, RecordedThetaMatchesFormula) {
    Grid g(tank());
    DtnSolver s(g);
    const Trajectory tr = integrate(s, wavy(g, 0.01), 20, 0.01);
    EXPECT_LT(corner_check(tr).max_relative, 1e-9);
}

TEST(Pohozaev, FlatSurfaceBalances) {
    Grid g(tank());
    DtnSolver s(g);
    Field psi = g.sample([](double x, double) { return std::cos(pi * x); });
    const PohozaevReport r = pohozaev(s, g.zeros(), psi);
    EXPECT_LT(r.relative(), 1e-10);
    EXPECT_GT(r.reference_scale, 0.1);
}

TEST(Pohozaev, CurvedSurfaceBalancesAndConverges) {
    double prev = 0.0;
    for (int n : {16, 32}) {
        Grid g(tank(n, n));
        DtnSolver s(g);
        const PohozaevReport r = pohozaev(s, wavy(g, 0.05).eta, wavy(g, 0.05).psi);
        EXPECT_LT(r.relative(), 1e-5) << n;
        if (prev > 0.0) EXPECT_LT(r.relative(), prev);
        prev = r.relative();
    }
}

TEST(Pohozaev, TwoDimensional) {
    TankConfig c = tank(16, 24);
    c.d = 2;
    c.n2 = 16;
    c.L2 = 1.5;
    Grid g(c);
    DtnSolver s(g);
    Field eta = g.sample([](double x, double y) { return 0.03 * std::cos(pi * x) * std::cos(2 * pi * y / 1.5); });
    Field psi = g.sample([](double x, double y) { return 0.05 * std::cos(2 * pi * x) * std::cos(pi * y / 1.5); });
    EXPECT_LT(pohozaev(s, eta, psi).relative(), 1e-6);
}

TEST(MainIdentity, RestIsZero) {
    Grid g(tank(16, 16));
    DtnSolver s(g);
    const Trajectory tr = integrate(s, {g.zeros(), g.zeros(), 0.0}, 4, 0.01);
    const IdentityReport r = main_identity(tr);
    EXPECT_EQ(r.BT, 0.0);
    EXPECT_EQ(r.residual, 0.0);
}

TEST(MainIdentity, RejectsOddStepCount) {
    Grid g(tank(16, 16));
    DtnSolver s(g);
    const Trajectory tr = integrate(s, {g.zeros(), g.zeros(), 0.0}, 3, 0.01);
    EXPECT_THROW(main_identity(tr), std::invalid_argument);
}

TEST(MainIdentity, BalancesOverShortRun) {
    Grid g(tank());
    DtnSolver s(g);
    const Trajectory tr = integrate(s, wavy(g, 0.01), 40, 0.01);
    const IdentityReport r = main_identity(tr);
    EXPECT_GT(r.reference_scale, 0.0);
    EXPECT_LT(r.relative(), 1e-4);
}

TEST(Elementary, PointwiseIdentities) {
    Grid g(tank());
    DtnSolver s(g);
    for (const auto& e : elementary_checks(s, wavy(g, 0.05))) {
        const double tol = e.name == "bottom_volume_exchange" ? 1e-6 : 1e-9;
        EXPECT_LT(e.relative(), tol) << e.name;
    }
}

TEST(Transport, PolynomialPairWithWallFlux) {
    Grid g(tank(16, 16));
    TestPair p;
    p.u = [](double, double, double y) { return y * y * y; };
    p.u_y = [](double, double, double y) { return 3 * y * y; };
    p.f = [](double x, double, double y) { return std::array<double, 2>{x * y, 0.0}; };
    p.div_f = [](double, double, double y) { return y; };
    const auto r = transport_checks(g, g.zeros(), p);
    for (const auto& e : r) EXPECT_LT(e.residual, 1e-12) << e.name;
    // Wall flux of x y over x = 1, -1 < y < 0 is -1/2.
    EXPECT_NEAR(integrate_fluid(g, g.zeros(), p.div_f), -0.5, 1e-14);
}

TEST(Transport, CurvedSurface) {
    Grid g(tank(32, 32));
    Field eta = g.sample([](double x, double) { return 0.1 * std::cos(pi * x); });
    TestPair p;
    p.u = [](double x, double, double y) { return std::exp(y) * (1 + 0.5 * std::cos(pi * x)); };
    p.u_y = p.u;
    p.f = [](double x, double, double y) { return std::array<double, 2>{y * y * std::sin(pi * x), 0.0}; };
    p.div_f = [](double x, double, double y) { return pi * y * y * std::cos(pi * x); };
    for (const auto& e : transport_checks(g, eta, p)) EXPECT_LT(e.residual, 1e-10) << e.name;
}

TEST(Corollary, HorizonAndBound) {
    EXPECT_TRUE(std::isinf(required_horizon(1, 2.0 / 7.0, 1.0, 1.0, 9.81)));
    EXPECT_NEAR(required_horizon(1, 0.0, 0.0, 1.0, 9.81), 2.0, 1e-15);
    // With B = 0, A = 0 the bound is T H / 2.
    EXPECT_DOUBLE_EQ(observability_lower_bound(1, 0.0, 0.0, 4.0, 3.0, 1.0, 9.81), 6.0);
}

TEST(MainIdentity, RunningResidualEndsAtReportResidual) {
    Grid g(tank(16, 16));
    DtnSolver s(g);
    const Trajectory tr = integrate(s, wavy(g, 0.01), 10, 0.01);
    const auto run = running_residual(tr);
    ASSERT_EQ(run.size(), 6u);
    EXPECT_EQ(run.front()[1], 0.0);
    EXPECT_NEAR(run.back()[1], main_identity(tr).residual, 1e-15);
}
