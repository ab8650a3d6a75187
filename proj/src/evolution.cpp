#include "wavetank/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wavetank {

namespace {

bool all_finite(const Field& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

SurfaceState axpy(const SurfaceState& s, double a, const Tendency& k) {
    SurfaceState out{s.eta, s.psi, s.t};
    for (std::size_t i = 0; i < out.eta.size(); ++i) {
        out.eta[i] += a * k.eta_t[i];
        out.psi[i] += a * k.psi_t[i];
    }
    return out;
}

std::string strip_stage(const NumericalError& e) {
    std::string msg = e.what();
    const std::string prefix = e.stage() + ": ";
    return msg.rfind(prefix, 0) == 0 ? msg.substr(prefix.size()) : msg;
}

}  // namespace

Field psi_tendency(const Grid& grid, const Field& eta, const Field& psi, const Field& G) {
    const VectorField ge = gradient(grid, eta);
    const VectorField gp = gradient(grid, psi);
    const double g = grid.config().g;
    Field out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double slope2 = 0.0, cross = 0.0, gp2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            slope2 += ge[a][i] * ge[a][i];
            cross += ge[a][i] * gp[a][i];
            gp2 += gp[a][i] * gp[a][i];
        }
        const double num = G[i] + cross;
        out[i] = -g * eta[i] - 0.5 * gp2 + num * num / (2.0 * (1.0 + slope2));
    }
    return out;
}

Evaluation evaluate(const DtnSolver& solver, const SurfaceState& state) {
    const Grid& grid = solver.grid();
    Evaluation ev;
    ev.potential = solver.harmonic_extension(state.eta, state.psi);
    ev.G = dtn_from_potential(ev.potential);
    ev.psi_t_exact = psi_tendency(grid, state.eta, state.psi, ev.G);
    if (grid.config().dealias) {
        ev.tendency.eta_t = dealias(grid, ev.G);
        ev.tendency.psi_t = dealias(grid, ev.psi_t_exact);
    } else {
        ev.tendency.eta_t = ev.G;
        ev.tendency.psi_t = ev.psi_t_exact;
    }
    return ev;
}

Tendency rhs(const DtnSolver& solver, const SurfaceState& state) {
    const Grid& grid = solver.grid();
    Field G = solver.apply(state.eta, state.psi);
    Field psi_t = psi_tendency(grid, state.eta, state.psi, G);
    if (grid.config().dealias) return {dealias(grid, G), dealias(grid, psi_t)};
    return {std::move(G), std::move(psi_t)};
}

double cfl_time_step(const Grid& grid, double c_cfl) {
    const auto& cfg = grid.config();
    double omega_max = 0.0;
    for (std::size_t p = 0; p < grid.nx1(); ++p)
        for (std::size_t q = 0; q < grid.nx2(); ++q) {
            const double k = std::sqrt(grid.laplace_symbol(p, q));
            omega_max = std::max(omega_max, std::sqrt(cfg.g * k * std::tanh(k * cfg.h)));
        }
    return c_cfl / omega_max;
}

SurfaceState step(const DtnSolver& solver, const SurfaceState& state, double dt, const Tendency* first) {
    const Grid& grid = solver.grid();
    const Tendency k1 = first ? *first : rhs(solver, state);
    const Tendency k2 = rhs(solver, axpy(state, 0.5 * dt, k1));
    const Tendency k3 = rhs(solver, axpy(state, 0.5 * dt, k2));
    const Tendency k4 = rhs(solver, axpy(state, dt, k3));
    SurfaceState out{state.eta, state.psi, state.t + dt};
    for (std::size_t i = 0; i < out.eta.size(); ++i) {
        out.eta[i] += dt / 6.0 * (k1.eta_t[i] + 2.0 * k2.eta_t[i] + 2.0 * k3.eta_t[i] + k4.eta_t[i]);
        out.psi[i] += dt / 6.0 * (k1.psi_t[i] + 2.0 * k2.psi_t[i] + 2.0 * k3.psi_t[i] + k4.psi_t[i]);
    }
    out.eta = remove_mean(grid, out.eta);
    if (!all_finite(out.eta) || !all_finite(out.psi)) throw NumericalError("evolution", "non-finite state");
    return out;
}

double energy(const Grid& grid, const SurfaceState& state, const Field& G) {
    const double g = grid.config().g;
    return 0.5 * (g * inner(grid, state.eta, state.eta) + inner(grid, state.psi, G));
}

double energy(const DtnSolver& solver, const SurfaceState& state) {
    return energy(solver.grid(), state, solver.apply(state.eta, state.psi));
}

Field theta(const Grid& grid, const Field& eta, const Field& psi_t) {
    const double g = grid.config().g;
    Field out(eta.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -eta[i] * psi_t[i] - 0.5 * g * eta[i] * eta[i];
    return out;
}

StepDiagnostics diagnose(const Grid& grid, const SurfaceState& state, const Evaluation& ev) {
    const auto& cfg = grid.config();
    const int d = grid.dim();
    StepDiagnostics s;
    s.t = state.t;
    s.H = energy(grid, state, ev.G);
    s.mean_eta = integrate_Q(grid, state.eta) / grid.area();
    s.min_eta = *std::min_element(state.eta.begin(), state.eta.end());
    s.max_abs_eta = max_abs(state.eta);

    const VectorField ge = gradient(grid, state.eta);
    const VectorField gp = gradient(grid, state.psi);
    s.max_grad_eta = max_norm(grid, ge);
    s.grad_psi_l2 = l2_norm(grid, gp);

    const Field th = theta(grid, state.eta, ev.psi_t_exact);
    const std::size_t last1 = grid.nx1() - 1, last2 = grid.nx2() - 1;
    if (d == 1) {
        s.wall_theta = cfg.L1 * th[grid.index(last1, 0)];
    } else {
        double face1 = 0.0, face2 = 0.0;
        for (std::size_t j = 0; j < grid.nx2(); ++j) face1 += grid.w2()[j] * th[grid.index(last1, j)];
        for (std::size_t i = 0; i < grid.nx1(); ++i) face2 += grid.w1()[i] * th[grid.index(i, last2)];
        s.wall_theta = cfg.L1 * face1 + cfg.L2 * face2;
    }
    const std::size_t corner = grid.index(last1, 0);
    s.m = state.eta[corner];
    s.m_prime = ev.G[corner];
    s.corner_theta = th[corner];
    for (std::size_t j = 0; j < grid.nx2(); ++j)
        s.wall_eta_max = std::max(s.wall_eta_max, std::abs(state.eta[grid.index(last1, j)]));
    if (d == 2)
        for (std::size_t i = 0; i < grid.nx1(); ++i)
            s.wall_eta_max = std::max(s.wall_eta_max, std::abs(state.eta[grid.index(i, last2)]));

    s.eta_psi = inner(grid, state.eta, state.psi);
    for (int a = 0; a < d; ++a) s.eta_x_grad_psi += integrate_moment(grid, hadamard(state.eta, gp[a]), a);
    s.quad = quadratures(ev.potential);
    s.elliptic_iterations = ev.potential.iterations;
    return s;
}

Trajectory integrate(const DtnSolver& solver, const SurfaceState& initial, int steps, double dt,
                     IntegrateOptions options) {
    if (steps < 0) throw std::invalid_argument("integrate: negative step count");
    if (!(dt != 0.0) || !std::isfinite(dt)) throw std::invalid_argument("integrate: dt must be finite and nonzero");
    const Grid& grid = solver.grid();
    const int stride = std::max(1, options.snapshot_stride);
    Trajectory tr;
    tr.config = grid.config();
    tr.dt = dt;
    tr.diagnostics.reserve(static_cast<std::size_t>(steps) + 1);
    SurfaceState state = initial;
    for (int k = 0;; ++k) {
        try {
            const Evaluation ev = evaluate(solver, state);
            tr.diagnostics.push_back(diagnose(grid, state, ev));
            if (k % stride == 0 || k == steps) tr.snapshots.push_back(state);
            if (k == steps) break;
            state = step(solver, state, dt, &ev.tendency);
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << "step " << k << ": " << strip_stage(e);
            throw NumericalError(e.stage(), os.str(), e.residual());
        } catch (const std::invalid_argument& e) {
            std::ostringstream os;
            os << "step " << k << ": " << e.what();
            throw NumericalError("evolution", os.str());
        }
    }
    return tr;
}

Trajectory integrate(const DtnSolver& solver, const SurfaceState& initial, double T, IntegrateOptions options) {
    const double dt = solver.grid().config().dt;
    const double n = T / dt;
    const long steps = std::lround(n);
    if (T < 0.0 || std::abs(n - static_cast<double>(steps)) > 1e-9 * std::max(1.0, n))
        throw std::invalid_argument("integrate: T must be a non-negative multiple of dt");
    return integrate(solver, initial, static_cast<int>(steps), dt, options);
}

GradientCheck hamiltonian_gradient_check(const DtnSolver& solver, const SurfaceState& state, const Field& delta_eta,
                                         const Field& delta_psi, double eps) {
    const Grid& grid = solver.grid();
    GradientCheck out;
    const Field G = solver.apply(state.eta, state.psi);

    auto H = [&](const Field& eta, const Field& psi) { return energy(solver, SurfaceState{eta, psi, state.t}); };

    out.derivative_psi = inner(grid, G, delta_psi);
    const double fd_psi =
        (H(state.eta, state.psi + eps * delta_psi) - H(state.eta, state.psi - eps * delta_psi)) / (2.0 * eps);
    out.residual_psi = std::abs(fd_psi - out.derivative_psi);

    const Field grad_eta = -1.0 * psi_tendency(grid, state.eta, state.psi, G);
    out.derivative_eta = inner(grid, grad_eta, delta_eta);
    const double fd_eta =
        (H(state.eta + eps * delta_eta, state.psi) - H(state.eta - eps * delta_eta, state.psi)) / (2.0 * eps);
    out.residual_eta = std::abs(fd_eta - out.derivative_eta);
    return out;
}

}  // namespace wavetank
