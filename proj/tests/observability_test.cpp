#include "wavetank/observability.hpp"

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
    c.dt = 0.02;
    return c;
}

}  // namespace

TEST(InitialData, ConstantModeIsTrivial) {
    Grid g(tank(16, 16));
    InitialDataSpec spec;
    spec.N = 0;
    spec.modes = {{0, 0, 0.01, 0.015}};
    const SurfaceState s = make_initial_data(spec, g);
    EXPECT_LT(max_abs(s.eta), 1e-16);
    DtnSolver solver(g);
    EXPECT_LT(max_abs(solver.apply(s.eta, s.psi)), 1e-12);
}

TEST(InitialData, SingleCosine) {
    Grid g(tank(16, 16));
    InitialDataSpec spec;
    spec.N = 1;
    spec.modes = {{1, 0, 1e-3, 0.0}};
    const SurfaceState s = make_initial_data(spec, g);
    for (std::size_t i = 0; i < s.eta.size(); ++i) EXPECT_NEAR(s.eta[i], 1e-3 * std::cos(pi * g.x1()[i]), 1e-17);
    EXPECT_EQ(max_abs(s.psi), 0.0);
}

TEST(InitialData, RejectsBadSpecs) {
    Grid g(tank(16, 16));
    InitialDataSpec spec;
    spec.N = 2;
    spec.modes = {{2, 1, 0.0, 0.0}};
    EXPECT_THROW(make_initial_data(spec, g), std::invalid_argument);
    spec.modes = {{1, 0, 0.1, 0.0}};
    EXPECT_THROW(make_initial_data(spec, g), std::invalid_argument);
    spec.modes = {};
    spec.beta = 0.5;
    EXPECT_THROW(make_initial_data(spec, g), std::invalid_argument);
}

TEST(InitialData, DeepTroughRejectedWithAmplitude) {
    Grid g(tank(16, 16));
    InitialDataSpec spec;
    spec.N = 1;
    spec.c = 1.0;
    spec.kappa = 0.0;
    spec.modes = {{1, 0, 0.6, 0.0}};
    try {
        make_initial_data(spec, g);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("-0.6"), std::string::npos) << e.what();
    }
}

TEST(InitialData, RandomIsSeededAndCapped) {
    const auto a = random_initial_data(4, 2, 0.02, 4.0, 0.6, 7);
    const auto b = random_initial_data(4, 2, 0.02, 4.0, 0.6, 7);
    const auto c = random_initial_data(4, 2, 0.02, 4.0, 0.6, 8);
    ASSERT_EQ(a.modes.size(), 15u);
    EXPECT_NO_THROW(a.validate(2));
    bool differs = false;
    for (std::size_t i = 0; i < a.modes.size(); ++i) {
        EXPECT_EQ(a.modes[i].a1, b.modes[i].a1);
        differs |= a.modes[i].a1 != c.modes[i].a1;
    }
    EXPECT_TRUE(differs);
}

TEST(InitialData, BumpIsSupportedInCentralRegion) {
    TankConfig c = tank(32, 16);
    c.d = 2;
    c.n2 = 16;
    Grid g(c);
    const Field chi = bump(g);
    for (std::size_t i = 0; i < g.nx1(); ++i)
        for (std::size_t j = 0; j < g.nx2(); ++j) {
            const double x = g.x1()[i], y = g.x2()[j];
            if (std::abs(x - 0.5) >= 0.4 || std::abs(y - 0.5) >= 0.4) EXPECT_EQ(chi[g.index(i, j)], 0.0);
        }
    EXPECT_DOUBLE_EQ(chi[g.index(16, 8)], 1.0);
}

TEST(InitialData, GradientScalesLikeSqrtN) {
    // Flat band-limited psi0 and eta0 = 0: ||grad psi|| / sqrt(2H) grows like N^(1/2).
    TankConfig c = tank(64, 32);
    Grid g(c);
    DtnSolver s(g);
    std::vector<double> lx, ly;
    for (int N : {2, 4, 8, 16}) {
        InitialDataSpec spec;
        spec.N = N;
        spec.c = 1.0;
        spec.kappa = 0.0;
        for (int n = 1; n <= N; ++n) spec.modes.push_back({n, 0, 0.0, 1e-3});
        const SurfaceState st = make_initial_data(spec, g);
        const double H = energy(s, st);
        lx.push_back(std::log(N));
        ly.push_back(std::log(l2_norm(g, gradient(g, st.psi)) / std::sqrt(2 * H)));
    }
    const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
    EXPECT_NEAR(slope, 0.5, 0.1);
}

TEST(Horizon, Formula) {
    EXPECT_DOUBLE_EQ(horizon(1, 0.0, 1.0, 9.81), 4.0);
    EXPECT_NEAR(horizon(2, 1.0, 2.0, 4.0), 4.0 * (1.0 + 7.0), 1e-14);
}

TEST(Experiment, RestPassesVacuously) {
    InitialDataSpec spec;
    spec.N = 0;
    const ObservabilityReport r = run_experiment(spec, tank(16, 16));
    EXPECT_EQ(r.H, 0.0);
    EXPECT_TRUE(r.hypothesis_met);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.steps % 2, 0);
}

TEST(Experiment, SingleModePasses) {
    InitialDataSpec spec;
    spec.N = 1;
    spec.modes = {{1, 0, 1e-3, 0.0}};
    const ObservabilityReport r = run_experiment(spec, tank(16, 16));
    EXPECT_TRUE(r.hypothesis_met);
    EXPECT_TRUE(r.pass);
    EXPECT_GT(r.margin, 0.0);
    EXPECT_GT(r.max_corner_trace, 0.0);
    EXPECT_GE(r.T_used, horizon(1, 2.0, 1.0, 9.81));
    EXPECT_EQ(r.trajectory.snapshots.size(), 2u);
}
