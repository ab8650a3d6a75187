#include "wavetank/observability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wavetank {

namespace {

constexpr double pi = std::numbers::pi;

double bump1(double x, double L) {
    const double r = (x - 0.5 * L) / (0.4 * L);
    if (std::abs(r) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

}  // namespace

double InitialDataSpec::cap() const { return N == 0 ? c : c * std::pow(static_cast<double>(N), -kappa); }

void InitialDataSpec::validate(int d) const {
    if (N < 0) throw std::invalid_argument("initial data: N must be >= 0");
    if (!(c > 0.0)) throw std::invalid_argument("initial data: c must be positive");
    if (!(beta > 0.5)) throw std::invalid_argument("initial data: beta must exceed 1/2");
    const double limit = cap() * (1.0 + 1e-12);
    for (const Mode& md : modes) {
        std::ostringstream os;
        os << "initial data: mode (" << md.n << ", " << md.m << ")";
        if (md.n < 0 || md.m < 0 || md.n + md.m > N) throw std::invalid_argument(os.str() + " outside n + m <= N");
        if (d == 1 && md.m != 0) throw std::invalid_argument(os.str() + " has m != 0 in d = 1");
        if (std::abs(md.a1) > limit || std::abs(md.a2) > limit) {
            os << " amplitude exceeds c N^-kappa = " << cap();
            throw std::invalid_argument(os.str());
        }
    }
}

InitialDataSpec random_initial_data(int N, int d, double c, double kappa, double beta, std::uint64_t seed) {
    InitialDataSpec spec;
    spec.N = N;
    spec.c = c;
    spec.kappa = kappa;
    spec.beta = beta;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-spec.cap(), spec.cap());
    for (int n = 0; n <= N; ++n)
        for (int m = 0; m <= (d == 2 ? N - n : 0); ++m) {
            const double a1 = u(rng);
            const double a2 = u(rng);
            spec.modes.push_back({n, m, a1, a2});
        }
    return spec;
}

Field bump(const Grid& grid) {
    const auto& cfg = grid.config();
    return grid.sample([&](double x1, double x2) {
        return bump1(x1, cfg.L1) * (grid.dim() == 2 ? bump1(x2, cfg.L2) : 1.0);
    });
}

SurfaceState make_initial_data(const InitialDataSpec& spec, const Grid& grid) {
    const auto& cfg = grid.config();
    spec.validate(grid.dim());
    const double s1 = cfg.h, s2 = cfg.h * std::sqrt(cfg.g * cfg.h);
    Field eta = grid.zeros(), psi = grid.zeros();
    for (const Mode& md : spec.modes) {
        const Field mode = grid.sample([&](double x1, double x2) {
            return std::cos(pi * md.n * x1 / cfg.L1) * (grid.dim() == 2 ? std::cos(pi * md.m * x2 / cfg.L2) : 1.0);
        });
        for (std::size_t i = 0; i < mode.size(); ++i) {
            eta[i] += s1 * md.a1 * mode[i];
            psi[i] += s2 * md.a2 * mode[i];
        }
    }
    if (spec.envelope == Envelope::Bump) {
        const Field chi = bump(grid);
        eta = dealias(grid, hadamard(chi, eta));
        psi = dealias(grid, hadamard(chi, psi));
    }
    eta = remove_mean(grid, eta);
    const double lowest = *std::min_element(eta.begin(), eta.end());
    if (lowest < -0.5 * cfg.h) {
        std::ostringstream os;
        os << "initial data: min eta0 = " << lowest << " below -h/2 (amplitude cap " << spec.cap() << ")";
        throw std::invalid_argument(os.str());
    }
    return {eta, psi, 0.0};
}

double horizon(int d, double A, double max_length, double g) {
    return 4.0 * (1.0 + (2.0 * d + 3.0) * max_length / std::sqrt(g) * A);
}

ObservabilityReport run_experiment(const InitialDataSpec& spec, const TankConfig& cfg,
                                   const ExperimentOptions& options) {
    cfg.validate();
    if (!(options.K0 > 0.0)) throw std::invalid_argument("experiment: K0 must be positive");
    if (!(options.tol_identity > 0.0)) throw std::invalid_argument("experiment: tol_identity must be positive");
    Grid grid(cfg);
    DtnSolver solver(grid);
    const SurfaceState initial = make_initial_data(spec, grid);

    ObservabilityReport r;
    r.N = spec.N;
    r.A_target = options.K0 * std::pow(static_cast<double>(std::max(spec.N, 1)), spec.beta);
    const double T = horizon(cfg.d, r.A_target, grid.max_length(), cfg.g);
    int steps = static_cast<int>(std::ceil(T / cfg.dt - 1e-9));
    if (steps % 2 != 0) ++steps;
    r.steps = steps;

    r.trajectory = integrate(solver, initial, steps, cfg.dt, {std::max(steps, 1)});
    r.identity = main_identity(r.trajectory);
    r.corollary = corollary_bound(r.identity, r.trajectory, options.tol_identity * r.identity.reference_scale);

    r.H = r.identity.H;
    r.T_used = r.identity.T;
    r.A_measured = r.corollary.A;
    r.B_measured = r.corollary.B;
    r.BT = boundary_functional(r.trajectory);
    r.margin = r.BT - r.H;
    for (const auto& s : r.trajectory.diagnostics) r.max_corner_trace = std::max(r.max_corner_trace, std::abs(s.m));

    r.hypothesis_met = r.B_measured <= 1.0 / (5.0 + 2.0 * cfg.d) && r.A_measured <= r.A_target && r.corollary.depth_ok;
    r.pass = r.hypothesis_met && r.margin >= -options.tol_identity * r.identity.reference_scale;
    return r;
}

}  // namespace wavetank
