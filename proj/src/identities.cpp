#include "wavetank/identities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavetank {

double simpson(const std::vector<double>& f, double dt) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    const std::size_t intervals = n - 1;
    if (intervals == 1) return 0.5 * dt * (f[0] + f[1]);
    std::size_t even = intervals % 2 == 0 ? intervals : intervals - 3;
    double s = 0.0;
    for (std::size_t i = 0; i + 2 <= even; i += 2) s += dt / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    if (even != intervals) {
        const std::size_t i = even;
        s += 3.0 * dt / 8.0 * (f[i] + 3.0 * f[i + 1] + 3.0 * f[i + 2] + f[i + 3]);
    }
    return s;
}

Field theta_field(const DtnSolver& solver, const SurfaceState& state) {
    const Grid& grid = solver.grid();
    const Field G = solver.apply(state.eta, state.psi);
    return theta(grid, state.eta, psi_tendency(grid, state.eta, state.psi, G));
}

double boundary_functional(const Trajectory& traj) {
    if (traj.diagnostics.empty()) throw std::invalid_argument("boundary_functional: trajectory has no diagnostics");
    std::vector<double> w;
    w.reserve(traj.diagnostics.size());
    for (const auto& d : traj.diagnostics) w.push_back(d.wall_theta);
    return simpson(w, traj.dt);
}

double corner_theta(double g, double m, double m_prime) { return 0.5 * (g * m * m - m * m_prime * m_prime); }

CornerCheck corner_check(const Trajectory& traj) {
    CornerCheck out;
    const double g = traj.config.g;
    for (std::size_t k = 0; k < traj.diagnostics.size(); ++k) {
        const auto& d = traj.diagnostics[k];
        const double formula = corner_theta(g, d.m, d.m_prime);
        const double scale = 0.5 * (g * d.m * d.m + std::abs(d.m) * d.m_prime * d.m_prime);
        const double diff = std::abs(d.corner_theta - formula);
        const double rel = scale > 0.0 ? diff / scale : (diff > 0.0 ? INFINITY : 0.0);
        if (rel > out.max_relative) {
            out.max_relative = rel;
            out.worst_step = static_cast<int>(k);
        }
    }
    return out;
}

PohozaevReport pohozaev(const DtnSolver& solver, const Field& eta, const Field& psi) {
    const Grid& grid = solver.grid();
    const int d = grid.dim();
    const FlattenedPotential pot = solver.harmonic_extension(eta, psi);
    const Field G = dtn_from_potential(pot);
    const SurfaceFields sf = surface_fields(grid, eta, psi, G);
    const VectorField gp = gradient(grid, psi);
    const VectorField ge = gradient(grid, eta);
    const PotentialQuadratures q = quadratures(pot);

    PohozaevReport r;
    for (int a = 0; a < d; ++a) r.lhs += integrate_moment(grid, hadamard(G, gp[a]), a);
    r.wall_bottom = q.wall_bottom;
    r.bulk = -0.5 * (d - 1) * q.volume_energy;

    Field S(grid.size());
    for (std::size_t i = 0; i < S.size(); ++i) {
        double v2 = 0.0;
        for (int a = 0; a < d; ++a) v2 += sf.V[a][i] * sf.V[a][i];
        S[i] = v2 + sf.B[i] * sf.B[i] - 2.0 * sf.B[i] * G[i];
    }
    double radial = 0.0;
    for (int a = 0; a < d; ++a) radial += integrate_moment(grid, hadamard(ge[a], S), a);
    r.surface = 0.5 * (inner(grid, eta, S) - radial);

    r.residual = r.lhs - (r.wall_bottom + r.bulk + r.surface);
    r.reference_scale = std::max({std::abs(r.lhs), std::abs(r.wall_bottom), std::abs(r.bulk), std::abs(r.surface)});
    return r;
}

IdentityReport main_identity(const Trajectory& traj) {
    if (traj.diagnostics.empty()) throw std::invalid_argument("main_identity: trajectory has no diagnostics");
    if (traj.steps() % 2 != 0) throw std::invalid_argument("main_identity: the step count must be even");
    const int d = traj.config.d;
    const double c = 5.0 + 2.0 * d;

    IdentityReport r;
    r.d = d;
    r.T = traj.duration();
    std::vector<double> wall, wb, be, vt;
    for (const auto& s : traj.diagnostics) {
        r.steps.push_back({s.t, s.wall_theta, s.quad.wall_bottom, s.quad.bottom_eta_weighted, s.quad.volume_triple});
        wall.push_back(s.wall_theta);
        wb.push_back(s.quad.wall_bottom);
        be.push_back(s.quad.bottom_eta_weighted);
        vt.push_back(s.quad.volume_triple);
    }
    const auto& first = traj.diagnostics.front();
    const auto& last = traj.diagnostics.back();
    r.H = first.H;
    r.BT = simpson(wall, traj.dt);
    r.TH_half = 0.5 * r.T * r.H;
    r.P = simpson(wb, traj.dt);
    r.I1 = c / 8.0 * simpson(be, traj.dt);
    r.I2 = -c / 4.0 * simpson(vt, traj.dt);
    r.I3 = -(0.5 * d - 0.25) * (last.eta_psi - first.eta_psi) - (last.eta_x_grad_psi - first.eta_x_grad_psi);
    r.residual = r.BT - (r.TH_half + r.P + r.I1 + r.I2 + r.I3);
    r.reference_scale = std::max({std::abs(r.BT), std::abs(r.TH_half), std::abs(r.P), std::abs(r.I1),
                                  std::abs(r.I2), std::abs(r.I3)});
    return r;
}

std::vector<std::array<double, 2>> running_residual(const Trajectory& traj) {
    std::vector<std::array<double, 2>> out;
    if (traj.diagnostics.empty()) return out;
    const int d = traj.config.d;
    const double c = 5.0 + 2.0 * d;
    const double dt = traj.dt;
    const auto& D = traj.diagnostics;
    const auto& first = D.front();
    // Integrand of B - P - I1 - I2 at step k.
    auto f = [&](std::size_t k) {
        return D[k].wall_theta - D[k].quad.wall_bottom - c / 8.0 * D[k].quad.bottom_eta_weighted +
               c / 4.0 * D[k].quad.volume_triple;
    };
    double acc = 0.0;
    for (std::size_t k = 0; k < D.size(); k += 2) {
        if (k > 0) acc += dt / 3.0 * (f(k - 2) + 4.0 * f(k - 1) + f(k));
        const double t = D[k].t - first.t;
        const double I3 = -(0.5 * d - 0.25) * (D[k].eta_psi - first.eta_psi) -
                          (D[k].eta_x_grad_psi - first.eta_x_grad_psi);
        out.push_back({D[k].t, acc - 0.5 * t * first.H - I3});
    }
    return out;
}

std::vector<ElementaryResidual> elementary_checks(const DtnSolver& solver, const SurfaceState& state) {
    const Grid& grid = solver.grid();
    const int d = grid.dim();
    const double g = grid.config().g;
    const double h = grid.config().h;
    const FlattenedPotential pot = solver.harmonic_extension(state.eta, state.psi);
    const Field G = dtn_from_potential(pot);
    const SurfaceFields sf = surface_fields(grid, state.eta, state.psi, G);
    const SurfaceFields tr = surface_traces(pot);
    const Field psi_t = psi_tendency(grid, state.eta, state.psi, G);
    const VectorField ge = gradient(grid, state.eta);
    const VectorField gp = gradient(grid, state.psi);

    ElementaryResidual bern{"surface_bernoulli"}, slope{"slope_expansion"}, trace{"trace_expansion"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v2 = 0.0, gp2 = 0.0, ge2 = 0.0, cross = 0.0, bvg = 0.0, tv2 = 0.0, tvg = 0.0;
        for (int a = 0; a < d; ++a) {
            v2 += sf.V[a][i] * sf.V[a][i];
            gp2 += gp[a][i] * gp[a][i];
            ge2 += ge[a][i] * ge[a][i];
            cross += ge[a][i] * gp[a][i];
            bvg += sf.B[i] * sf.V[a][i] * ge[a][i];
            tv2 += tr.V[a][i] * tr.V[a][i];
            tvg += tr.V[a][i] * ge[a][i];
        }
        const double B = sf.B[i];

        const double bl = 0.5 * (v2 + B * B - 2.0 * B * G[i]);
        const double br = -psi_t[i] - g * state.eta[i];
        bern.residual = std::max(bern.residual, std::abs(bl - br));
        bern.scale = std::max(bern.scale, std::abs(psi_t[i]) + g * std::abs(state.eta[i]));

        const double num = cross + G[i];
        const double sl = 0.5 * gp2 - num * num / (2.0 * (1.0 + ge2));
        const double sr = 0.5 * v2 + bvg - 0.5 * B * B;
        slope.residual = std::max(slope.residual, std::abs(sl - sr));
        slope.scale = std::max({slope.scale, 0.5 * gp2, 0.5 * v2 + 0.5 * B * B});

        const double tl = -0.5 * gp2 + 0.5 * (1.0 + ge2) * B * B;
        const double By = tr.B[i];
        const double trr = 0.5 * (By * By - tv2 - 2.0 * By * tvg);
        trace.residual = std::max(trace.residual, std::abs(tl - trr));
        trace.scale = std::max({trace.scale, 0.5 * gp2, 0.5 * (1.0 + ge2) * B * B});
    }

    const PotentialQuadratures q = quadratures(pot);
    ElementaryResidual exchange{"bottom_volume_exchange"};
    const double lhs = q.volume_vertical_minus_horizontal + h * q.bottom_squared;
    const double rhs = -q.bottom_eta_weighted + 2.0 * q.volume_triple;
    exchange.residual = std::abs(lhs - rhs);
    exchange.scale = std::max({std::abs(q.volume_vertical_minus_horizontal), h * q.bottom_squared,
                               std::abs(q.bottom_eta_weighted), 2.0 * std::abs(q.volume_triple)});
    return {bern, slope, trace, exchange};
}

namespace {

// int_{-h}^{eta} f dy at one column, by Clenshaw-Curtis on the flattened levels.
double column_integral(const Grid& grid, double eta, double x1, double x2,
                       const std::function<double(double, double, double)>& f) {
    const double h = grid.config().h;
    const auto& z = grid.z();
    const auto& wz = grid.wz();
    double s = 0.0;
    for (std::size_t l = 0; l < z.size(); ++l) s += wz[l] * f(x1, x2, (1.0 + z[l] / h) * eta + z[l]);
    return s * (1.0 + eta / h);
}

}  // namespace

double integrate_fluid(const Grid& grid, const Field& eta, const std::function<double(double, double, double)>& f) {
    Field col(grid.size());
    for (std::size_t i = 0; i < grid.nx1(); ++i)
        for (std::size_t j = 0; j < grid.nx2(); ++j) {
            const std::size_t c = grid.index(i, j);
            col[c] = column_integral(grid, eta[c], grid.x1()[i], grid.x2()[j], f);
        }
    return integrate_Q(grid, col);
}

std::vector<ElementaryResidual> transport_checks(const Grid& grid, const Field& eta, const TestPair& pair) {
    const int d = grid.dim();
    const double h = grid.config().h;
    const VectorField ge = gradient(grid, eta);

    Field u_top(grid.size()), u_bottom(grid.size()), f_dot(grid.size());
    for (std::size_t i = 0; i < grid.nx1(); ++i)
        for (std::size_t j = 0; j < grid.nx2(); ++j) {
            const std::size_t c = grid.index(i, j);
            const double x1 = grid.x1()[i], x2 = grid.x2()[j];
            u_top[c] = pair.u(x1, x2, eta[c]);
            u_bottom[c] = pair.u(x1, x2, -h);
            const auto fv = pair.f(x1, x2, eta[c]);
            f_dot[c] = 0.0;
            for (int a = 0; a < d; ++a) f_dot[c] += fv[a] * ge[a][c];
        }
    const double top = integrate_Q(grid, u_top);
    const double bottom = integrate_Q(grid, u_bottom);
    const double vol_uy = integrate_fluid(grid, eta, pair.u_y);
    const double surf_f = integrate_Q(grid, f_dot);
    const double vol_div = integrate_fluid(grid, eta, pair.div_f);

    // Wall flux: outward normal +e_a on x_a = L_a, -e_a on x_a = 0.
    double flux = 0.0;
    const std::size_t last1 = grid.nx1() - 1, last2 = grid.nx2() - 1;
    for (std::size_t j = 0; j < grid.nx2(); ++j) {
        const double x2 = grid.x2()[j];
        const double w = grid.w2()[j];
        auto f1 = [&](double a, double b, double y) { return pair.f(a, b, y)[0]; };
        flux += w * (column_integral(grid, eta[grid.index(last1, j)], grid.x1()[last1], x2, f1) -
                     column_integral(grid, eta[grid.index(0, j)], grid.x1()[0], x2, f1));
    }
    if (d == 2) {
        for (std::size_t i = 0; i < grid.nx1(); ++i) {
            const double x1 = grid.x1()[i];
            const double w = grid.w1()[i];
            auto f2 = [&](double a, double b, double y) { return pair.f(a, b, y)[1]; };
            flux += w * (column_integral(grid, eta[grid.index(i, last2)], x1, grid.x2()[last2], f2) -
                         column_integral(grid, eta[grid.index(i, 0)], x1, grid.x2()[0], f2));
        }
    }

    auto make = [](const char* name, double l, double r, std::initializer_list<double> terms) {
        ElementaryResidual e{name};
        e.residual = std::abs(l - r);
        for (double t : terms) e.scale = std::max(e.scale, std::abs(t));
        return e;
    };
    return {
        make("vertical_integration", top, vol_uy + bottom, {top, vol_uy, bottom}),
        make("lateral_divergence", surf_f + vol_div, flux, {surf_f, vol_div, flux}),
        make("combined_transport", top + surf_f, vol_uy - vol_div + bottom + flux,
             {top, surf_f, vol_uy, vol_div, bottom, flux}),
    };
}

double required_horizon(int d, double B, double A, double max_length, double g) {
    const double c = 5.0 + 2.0 * d;
    if (B >= 2.0 / c) return INFINITY;
    return 4.0 / (2.0 - c * B) * (1.0 + (2.0 * d + 3.0) * max_length / std::sqrt(g) * A);
}

double observability_lower_bound(int d, double B, double A, double T, double H, double max_length, double g) {
    const double c = 5.0 + 2.0 * d;
    return (0.5 * T - 0.25 * c * B * T - (d + 1.5) * max_length * 2.0 / std::sqrt(g) * A) * H;
}

CorollaryReport corollary_bound(const IdentityReport& report, const Trajectory& traj, double slack) {
    const auto& cfg = traj.config;
    const int d = cfg.d;
    const double max_length = d == 2 ? std::max(cfg.L1, cfg.L2) : cfg.L1;
    CorollaryReport c;
    c.H = report.H;
    c.T = report.T;
    c.BT = report.BT;
    c.depth_ok = true;
    for (const auto& s : traj.diagnostics) {
        c.B = std::max(c.B, s.max_grad_eta);
        if (c.H > 0.0) c.A = std::max(c.A, s.grad_psi_l2 / std::sqrt(2.0 * c.H));
        if (s.min_eta < -4.0 * cfg.h / 9.0) c.depth_ok = false;
    }
    c.T_required = required_horizon(d, c.B, c.A, max_length, cfg.g);
    c.steepness_ok = c.B < 2.0 / (5.0 + 2.0 * d);
    c.horizon_ok = c.T >= c.T_required;
    c.hypothesis_met = c.steepness_ok && c.horizon_ok && c.depth_ok;
    c.lower_bound = observability_lower_bound(d, c.B, c.A, c.T, c.H, max_length, cfg.g);
    c.bound_respected = c.BT >= c.lower_bound - slack;
    c.observed = c.BT >= c.H;
    return c;
}

}  // namespace wavetank
