#include "wavetank/dtn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace wavetank;

namespace {

constexpr double pi = std::numbers::pi;

// Operator properties are checked well below the time-stepping tolerance.
const DtnOptions tight{1e-13, 400, 40};

TankConfig tank1(int n, int nz) {
    TankConfig c;
    c.d = 1;
    c.L1 = 1.0;
    c.h = 1.0;
    c.n1 = n;
    c.nz = nz;
    return c;
}

}  // namespace

TEST(Dtn, FlatSymbol) {
    Grid g(tank1(32, 32));
    DtnSolver s(g, tight);
    const Field eta = g.zeros();
    for (int p : {1, 3, 8, 15}) {
        const double k = pi * p;
        Field psi = g.sample([&](double x, double) { return std::cos(k * x); });
        Field G = s.apply(eta, psi);
        for (std::size_t i = 0; i < psi.size(); ++i)
            EXPECT_NEAR(G[i], k * std::tanh(k) * psi[i], 1e-9 * k) << p;
    }
}

TEST(Dtn, ConstantsInKernel) {
    Grid g(tank1(32, 24));
    DtnSolver s(g, tight);
    Field eta = g.sample([](double x, double) { return 0.1 * std::cos(pi * x) + 0.05 * std::cos(2 * pi * x); });
    Field G = s.apply(eta, g.constant(1.0));
    EXPECT_LT(max_abs(G), 1e-10);
}

TEST(Dtn, MassConservation) {
    // int G psi = 0 for every psi (no flux through walls or bottom).
    Grid g(tank1(32, 24));
    DtnSolver s(g, tight);
    Field eta = g.sample([](double x, double) { return 0.1 * std::cos(pi * x) + 0.05 * std::cos(2 * pi * x); });
    Field psi = g.sample([](double x, double) { return std::sin(2.0 * x) + 0.3 * std::cos(3 * pi * x); });
    const Field G = s.apply(eta, psi);
    EXPECT_NEAR(integrate_Q(g, G), 0.0, 1e-10);
}

TEST(Dtn, SelfAdjointAndPositive) {
    Grid g(tank1(32, 32));
    DtnSolver s(g, tight);
    Field eta = g.sample([](double x, double) { return 0.15 * std::cos(pi * x) + 0.05 * std::cos(3 * pi * x); });
    Field a = g.sample([](double x, double) { return std::cos(2 * pi * x) + 0.2 * x * x; });
    Field b = g.sample([](double x, double) { return std::exp(-4.0 * (x - 0.3) * (x - 0.3)); });
    const double ab = inner(g, s.apply(eta, a), b);
    const double ba = inner(g, a, s.apply(eta, b));
    EXPECT_NEAR(ab, ba, 1e-9 * std::max(1.0, std::abs(ab)));
    EXPECT_GT(inner(g, s.apply(eta, a), a), 0.0);
}

TEST(Dtn, EnergyIdentity) {
    // int psi G psi = iint |grad phi|^2
    Grid g(tank1(32, 32));
    DtnSolver s(g, tight);
    Field eta = g.sample([](double x, double) { return 0.1 * std::cos(pi * x); });
    Field psi = g.sample([](double x, double) { return std::cos(2 * pi * x); });
    FlattenedPotential pot = s.harmonic_extension(eta, psi);
    const double lhs = inner(g, psi, dtn_from_potential(pot));
    EXPECT_NEAR(lhs, quadratures(pot).volume_energy, 1e-9);
}

TEST(Dtn, TracesMatchSurfaceFormula) {
    Grid g(tank1(32, 32));
    DtnSolver s(g, tight);
    Field eta = g.sample([](double x, double) { return 0.1 * std::cos(pi * x); });
    Field psi = g.sample([](double x, double) { return 0.5 * std::cos(2 * pi * x); });
    FlattenedPotential pot = s.harmonic_extension(eta, psi);
    SurfaceFields a = surface_fields(g, eta, psi, dtn_from_potential(pot));
    SurfaceFields b = surface_traces(pot);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        EXPECT_NEAR(a.B[i], b.B[i], 1e-10);
        EXPECT_NEAR(a.V[0][i], b.V[0][i], 1e-10);
    }
}

TEST(Dtn, RejectsDeepTrough) {
    Grid g(tank1(16, 16));
    DtnSolver s(g, tight);
    Field eta = g.sample([](double x, double) { return -0.6 * std::cos(pi * x); });
    EXPECT_THROW(s.apply(eta, g.constant(1.0)), std::invalid_argument);
}

TEST(Dtn, ShapeDerivativeMatchesDifferenceQuotient) {
    Grid g(tank1(32, 32));
    DtnSolver s(g, tight);
    Field eta = g.sample([](double x, double) { return 0.1 * std::cos(pi * x); });
    Field psi = g.sample([](double x, double) { return std::cos(2 * pi * x); });
    Field de = g.sample([](double x, double) { return 0.2 * std::cos(3 * pi * x); });
    Field exact = shape_derivative(s, eta, psi, de);
    auto fd = [&](double e) {
        Field p = s.apply(eta + e * de, psi), m = s.apply(eta - e * de, psi);
        Field out(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) out[i] = (p[i] - m[i]) / (2 * e) - exact[i];
        return max_abs(out);
    };
    const double e1 = fd(1e-2), e2 = fd(5e-3);
    EXPECT_LT(e1, 1e-3);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.3);
}
