#pragma once

// Exact integral identities of the tank problem evaluated on numerical
// solutions: the boundary functional B(T), the Pohozaev identity for G(eta),
// the observability identity and the lower bound it implies.

#include "wavetank/evolution.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace wavetank {

/// Composite Simpson rule on uniformly spaced samples; an odd number of
/// intervals ends with a 3/8 panel, a single interval falls back to the
/// trapezoid.
double simpson(const std::vector<double>& f, double dt);

/// Theta = -eta d_t psi - (g/2) eta^2 on Q.
Field theta_field(const DtnSolver& solver, const SurfaceState& state);

/// B(T): time integral of the wall traces of Theta.
double boundary_functional(const Trajectory& traj);

/// (1/2) [g m^2 - m m'^2], the wall value of Theta at the corner (L1, 0).
double corner_theta(double g, double m, double m_prime);

struct CornerCheck {
    double max_relative = 0.0;
    int worst_step = 0;
};

/// Compares the recorded corner Theta with corner_theta at every step.
CornerCheck corner_check(const Trajectory& traj);

struct PohozaevReport {
    double lhs = 0.0;          // int_Q G(eta)psi (x . grad psi)
    double wall_bottom = 0.0;  // walls x_a = L_a and bottom, weighted by (x, y) . n
    double bulk = 0.0;         // -(d - 1)/2 iint |grad phi|^2
    double surface = 0.0;     // (1/2) int (eta - x . grad eta)(V^2 + B^2 - 2 B G psi)
    double residual = 0.0;
    double reference_scale = 0.0;

    double relative() const { return reference_scale > 0.0 ? std::abs(residual) / reference_scale : 0.0; }
};

PohozaevReport pohozaev(const DtnSolver& solver, const Field& eta, const Field& psi);

struct IdentityStep {
    double t = 0.0;
    double wall_theta = 0.0;
    double wall_bottom = 0.0;
    double bottom_eta_weighted = 0.0;
    double volume_triple = 0.0;
};

struct IdentityReport {
    int d = 1;
    double T = 0.0;
    double H = 0.0;
    double BT = 0.0;
    double TH_half = 0.0;
    double P = 0.0;
    double I1 = 0.0;
    double I2 = 0.0;
    double I3 = 0.0;
    double residual = 0.0;
    double reference_scale = 0.0;
    std::vector<IdentityStep> steps;

    double relative() const { return reference_scale > 0.0 ? std::abs(residual) / reference_scale : 0.0; }
};

/// B(T) against T H / 2 + P + I1 + I2 + I3. Requires an even number of steps.
IdentityReport main_identity(const Trajectory& traj);

/// Residual of the identity over [0, t_k] for every even k, as (t_k, residual).
std::vector<std::array<double, 2>> running_residual(const Trajectory& traj);

struct ElementaryResidual {
    std::string name;
    double residual = 0.0;  // max pointwise or absolute difference
    double scale = 0.0;     // magnitude of the larger side

    double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

/// Pointwise surface identities relating B, V, G psi and d_t psi, and the
/// bottom/volume exchange identity for the harmonic extension:
///   surface_bernoulli:  (V^2 + B^2 - 2 B G psi)/2 = -d_t psi - g eta
///   slope_expansion:    |grad psi|^2/2 - (grad eta . grad psi + G psi)^2 / (2(1 + |grad eta|^2))
///                       = V^2/2 + B V . grad eta - B^2/2
///   trace_expansion:    -|grad psi|^2/2 + (1 + |grad eta|^2) B^2/2
///                       = (phi_y^2 - |grad_x phi|^2 - 2 phi_y grad_x phi . grad eta)/2 at y = eta
///   bottom_volume_exchange:
///       iint (phi_y^2 - |grad_x phi|^2) + int h |grad_x phi|^2(x, -h)
///       = -int eta |grad_x phi|^2(x, -h) + 2 iint phi_y grad eta . grad_x phi
std::vector<ElementaryResidual> elementary_checks(const DtnSolver& solver, const SurfaceState& state);

/// A scalar u(x1, x2, y) and a horizontal vector field f(x1, x2, y) with the
/// derivatives the transport identities need.
struct TestPair {
    std::function<double(double, double, double)> u;
    std::function<double(double, double, double)> u_y;
    std::function<std::array<double, 2>(double, double, double)> f;
    std::function<double(double, double, double)> div_f;
};

/// Transport identities over the fluid domain below eta:
///   vertical_integration: int u(x, eta) = iint u_y + int u(x, -h)
///   lateral_divergence:   int f(x, eta) . grad eta + iint div_x f = wall flux of f
///   combined_transport:   int u(x, eta) + int f(x, eta) . grad eta
///                         = iint (u_y - div_x f) + int u(x, -h) + wall flux of f
std::vector<ElementaryResidual> transport_checks(const Grid& grid, const Field& eta, const TestPair& pair);

/// iint over {-h < y < eta} of f(x1, x2, y), on the flattened Chebyshev nodes.
double integrate_fluid(const Grid& grid, const Field& eta, const std::function<double(double, double, double)>& f);

/// Required horizon 4/(2 - (5+2d) B) [1 + (2d+3) max L A / sqrt(g)].
double required_horizon(int d, double B, double A, double max_length, double g);

/// (T/2 - (5+2d)/4 B T - (d + 3/2) max L (2/sqrt(g)) A) H.
double observability_lower_bound(int d, double B, double A, double T, double H, double max_length, double g);

struct CorollaryReport {
    double B = 0.0;  // sup_t ||grad eta||_inf
    double A = 0.0;  // sup_t ||grad psi||_L2 / sqrt(2H)
    double H = 0.0;
    double T = 0.0;
    double T_required = 0.0;
    double lower_bound = 0.0;
    double BT = 0.0;
    bool steepness_ok = false;
    bool horizon_ok = false;
    bool depth_ok = false;
    bool hypothesis_met = false;
    bool bound_respected = false;  // BT >= lower_bound - slack
    bool observed = false;         // BT >= H
};

/// Checks the hypotheses of the observability estimate on measured sup norms
/// and compares B(T) with its lower bound and with H. `slack` absorbs the
/// numerical residual of the identity.
CorollaryReport corollary_bound(const IdentityReport& report, const Trajectory& traj, double slack = 0.0);

}  // namespace wavetank
