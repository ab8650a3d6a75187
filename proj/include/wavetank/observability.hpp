#pragma once

// Band-limited initial data, horizon sizing and the B(T) >= H experiment.

#include "wavetank/identities.hpp"

#include <cstdint>
#include <vector>

namespace wavetank {

/// One cosine mode cos(pi n x1 / L1) cos(pi m x2 / L2) with dimensionless
/// amplitudes a1 (eta, scaled by h) and a2 (psi, scaled by h sqrt(g h)).
struct Mode {
    int n = 0;
    int m = 0;
    double a1 = 0.0;
    double a2 = 0.0;
};

enum class Envelope { One, Bump };

struct InitialDataSpec {
    int N = 1;
    std::vector<Mode> modes;
    Envelope envelope = Envelope::One;
    double c = 0.02;
    double kappa = 4.0;
    double beta = 0.6;

    /// c N^-kappa (c when N = 0).
    double cap() const;

    /// Throws std::invalid_argument on modes outside n + m <= N (m = 0 in
    /// d = 1), amplitudes above the cap, or beta <= 1/2.
    void validate(int d) const;
};

/// Every mode with n + m <= N, amplitudes uniform in [-cap, cap].
InitialDataSpec random_initial_data(int N, int d, double c, double kappa, double beta, std::uint64_t seed);

/// exp(1 - 1/(1 - r^2)) per axis, r = (x - L/2) / (0.4 L); zero outside the central 80%.
Field bump(const Grid& grid);

/// Assembles eta0 and psi0, truncates at the dealias cutoff when the
/// envelope is a bump, and removes the mean of eta0. Throws
/// std::invalid_argument if min eta0 < -h/2.
SurfaceState make_initial_data(const InitialDataSpec& spec, const Grid& grid);

/// T(A) = 4 [1 + (2d + 3) max L / sqrt(g) A].
double horizon(int d, double A, double max_length, double g);

struct ExperimentOptions {
    double K0 = 2.0;
    double tol_identity = 1e-4;
};

struct ObservabilityReport {
    int N = 0;
    double H = 0.0;
    double A_target = 0.0;
    double A_measured = 0.0;
    double B_measured = 0.0;
    double T_used = 0.0;
    int steps = 0;
    double BT = 0.0;
    double margin = 0.0;
    double max_corner_trace = 0.0;  // sup_t |m(t)|
    bool hypothesis_met = false;
    bool pass = false;
    IdentityReport identity;
    CorollaryReport corollary;
    Trajectory trajectory;  // diagnostics at every step, snapshots at both ends
};

/// Integrates to T(K0 N^beta) rounded up to an even number of steps of cfg.dt
/// and checks B(T) >= H.
ObservabilityReport run_experiment(const InitialDataSpec& spec, const TankConfig& cfg,
                                   const ExperimentOptions& options = {});

}  // namespace wavetank
