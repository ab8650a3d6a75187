#pragma once

// Time integration of the Craig-Sulem-Zakharov system
//
//     d eta / dt = G(eta) psi
//     d psi / dt = -g eta - |grad psi|^2 / 2
//                  + (G(eta) psi + grad eta . grad psi)^2 / (2 (1 + |grad eta|^2))
//
// with classical RK4 and the energy H = (1/2) int_Q (g eta^2 + psi G(eta) psi).

#include "wavetank/dtn.hpp"
#include "wavetank/spectral_grid.hpp"

#include <vector>

namespace wavetank {

struct SurfaceState {
    Field eta;
    Field psi;
    double t = 0.0;
};

struct Tendency {
    Field eta_t;
    Field psi_t;
};

/// One right-hand-side evaluation together with what it needed.
struct Evaluation {
    FlattenedPotential potential;
    Field G;
    Tendency tendency;    // dealiased when the tank config asks for it
    Field psi_t_exact;    // the psi equation evaluated pointwise, no truncation
};

/// d psi / dt from the surface fields and G psi, pointwise.
Field psi_tendency(const Grid& grid, const Field& eta, const Field& psi, const Field& G);

Evaluation evaluate(const DtnSolver& solver, const SurfaceState& state);
Tendency rhs(const DtnSolver& solver, const SurfaceState& state);

/// Stability guideline c_cfl / sqrt(g k_max tanh(k_max h)).
double cfl_time_step(const Grid& grid, double c_cfl = 1.0);

/// One RK4 step; eta is re-projected to zero mean afterwards. `first` may
/// carry the tendency at `state` when the caller already has it.
/// Throws NumericalError("evolution", ...) on non-finite values.
SurfaceState step(const DtnSolver& solver, const SurfaceState& state, double dt, const Tendency* first = nullptr);

double energy(const Grid& grid, const SurfaceState& state, const Field& G);
double energy(const DtnSolver& solver, const SurfaceState& state);

/// Everything the identity checks read at one time level.
struct StepDiagnostics {
    double t = 0.0;
    double H = 0.0;
    double mean_eta = 0.0;
    double min_eta = 0.0;
    double max_abs_eta = 0.0;
    double max_grad_eta = 0.0;    // sup_x |grad eta|
    double grad_psi_l2 = 0.0;     // ||grad psi||_L2(Q)
    double wall_theta = 0.0;      // integrand of B(T) at this time
    double m = 0.0;               // eta at the corner (L1, 0)
    double m_prime = 0.0;         // G(eta) psi at the corner
    double corner_theta = 0.0;    // Theta at the corner
    double wall_eta_max = 0.0;    // max |eta| over the walls x1 = L1 and x2 = L2
    double eta_psi = 0.0;         // int_Q eta psi
    double eta_x_grad_psi = 0.0;  // int_Q eta (x . grad psi)
    PotentialQuadratures quad;
    int elliptic_iterations = 0;
};

struct Trajectory {
    TankConfig config;
    double dt = 0.0;
    std::vector<SurfaceState> snapshots;      // every `snapshot_stride` steps, always including both ends
    std::vector<StepDiagnostics> diagnostics; // one per time level 0..steps

    int steps() const { return static_cast<int>(diagnostics.size()) - 1; }
    double duration() const { return diagnostics.empty() ? 0.0 : diagnostics.back().t - diagnostics.front().t; }
};

/// Theta = -eta d_t psi - (g/2) eta^2.
Field theta(const Grid& grid, const Field& eta, const Field& psi_t);

StepDiagnostics diagnose(const Grid& grid, const SurfaceState& state, const Evaluation& ev);

struct IntegrateOptions {
    int snapshot_stride = 1;
};

/// Integrates `steps` RK4 steps of size dt (dt may be negative).
Trajectory integrate(const DtnSolver& solver, const SurfaceState& initial, int steps, double dt,
                     IntegrateOptions options = {});

/// Integrates to time T with the configured dt; T must be a whole number of steps.
Trajectory integrate(const DtnSolver& solver, const SurfaceState& initial, double T, IntegrateOptions options = {});

struct GradientCheck {
    double residual_psi = 0.0;
    double residual_eta = 0.0;
    double derivative_psi = 0.0;  // <G psi, delta_psi>
    double derivative_eta = 0.0;  // <dH/d eta, delta_eta>
};

/// Central differences of H against the functional derivatives
/// dH/d psi = G(eta) psi and dH/d eta = -d psi/dt.
GradientCheck hamiltonian_gradient_check(const DtnSolver& solver, const SurfaceState& state, const Field& delta_eta,
                                         const Field& delta_psi, double eps);

}  // namespace wavetank
