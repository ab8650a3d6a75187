#include "wavetank/dtn.hpp"

#include "wavetank/chebyshev.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace wavetank {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    const auto n = static_cast<Eigen::Index>(a.size());
    return Eigen::Map<const Eigen::VectorXd>(a.data(), n).dot(Eigen::Map<const Eigen::VectorXd>(b.data(), n));
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Geometry of the flattening map for one eta.
struct Geometry {
    Field eta;
    Field jac;
    VectorField grad_eta;
    std::vector<double> sigma;
};

}  // namespace

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRows = Eigen::Map<RowMatrix>;
using ConstMapRows = Eigen::Map<const RowMatrix>;

namespace {

// Dense 1D operators of one horizontal axis, acting on nodal columns.
struct AxisOperators {
    Eigen::MatrixXd analysis;    // nodes -> cosine coefficients
    Eigen::MatrixXd synthesis;   // cosine coefficients -> nodes
    Eigen::MatrixXd even_to_odd; // d/dx of an even field
    Eigen::MatrixXd odd_to_even; // d/dx of an odd field
};

AxisOperators axis_operators(const AxisTransform& t, const std::vector<double>& k) {
    const int n = t.modes();
    const int m = n + 1;
    AxisOperators ops;
    ops.analysis.resize(m, m);
    ops.synthesis.resize(m, m);
    ops.even_to_odd.resize(m, m);
    ops.odd_to_even.resize(m, m);
    std::vector<double> e(m), c(m), out(m);
    for (int j = 0; j < m; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        t.analyze(Parity::Even, e, c);
        for (int i = 0; i < m; ++i) ops.analysis(i, j) = c[i];
        t.synthesize(Parity::Even, e, out);
        for (int i = 0; i < m; ++i) ops.synthesis(i, j) = out[i];

        for (int i = 0; i < m; ++i) c[i] = (i == 0 || i == n) ? 0.0 : -k[i] * c[i];
        t.synthesize(Parity::Odd, c, out);
        for (int i = 0; i < m; ++i) ops.even_to_odd(i, j) = out[i];

        t.analyze(Parity::Odd, e, c);
        for (int i = 0; i < m; ++i) c[i] = (i == 0 || i == n) ? 0.0 : k[i] * c[i];
        t.synthesize(Parity::Even, c, out);
        for (int i = 0; i < m; ++i) ops.odd_to_even(i, j) = out[i];
    }
    return ops;
}

}  // namespace

struct DtnSolver::Impl {
    const Grid& grid;
    std::size_t nc, nl, nx1, nx2;
    Eigen::MatrixXd Dz;
    std::array<AxisOperators, 2> ax;

    // Flat-strip solve: surface and bottom rows eliminated, interior block
    // of the vertical operator diagonalized once.
    Eigen::MatrixXd V, Vinv;
    Eigen::VectorXd lambda;
    Eigen::VectorXd d2_top, d2_bottom, d_bottom_row;
    double d_bottom_top = 0.0, d_bottom_bottom = 0.0;
    RowMatrix shift_inverse;  // 1 / (lambda_e - k_m^2)

    std::vector<double> sigma;

    explicit Impl(const Grid& g)
        : grid(g), nc(g.size()), nl(g.nz_levels()), nx1(g.nx1()), nx2(g.nx2()) {
        const int nz = g.config().nz;
        const double h = g.config().h;
        const auto dvec = chebyshev::derivative_matrix(nz, h);
        Dz.resize(nl, nl);
        for (std::size_t i = 0; i < nl; ++i)
            for (std::size_t j = 0; j < nl; ++j) Dz(i, j) = dvec[i * nl + j];
        const Eigen::MatrixXd D2 = Dz * Dz;

        ax[0] = axis_operators(g.transform(0), g.k1());
        if (g.dim() == 2) ax[1] = axis_operators(g.transform(1), g.k2());

        const Eigen::Index N = static_cast<Eigen::Index>(nl) - 1, ni = N - 1;
        d_bottom_top = Dz(N, 0);
        d_bottom_bottom = Dz(N, N);
        d_bottom_row = Dz.row(N).segment(1, ni).transpose();
        d2_top = D2.col(0).segment(1, ni);
        d2_bottom = D2.col(N).segment(1, ni);
        const Eigen::MatrixXd A = D2.block(1, 1, ni, ni) - d2_bottom * d_bottom_row.transpose() / d_bottom_bottom;
        Eigen::EigenSolver<Eigen::MatrixXd> es(A);
        if (es.info() != Eigen::Success ||
            es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-8 * es.eigenvalues().cwiseAbs().maxCoeff())
            throw std::runtime_error("dtn: vertical operator is not diagonalizable over the reals");
        lambda = es.eigenvalues().real();
        V = es.eigenvectors().real();
        Vinv = V.inverse();

        shift_inverse.resize(ni, static_cast<Eigen::Index>(nc));
        for (std::size_t p = 0; p < nx1; ++p)
            for (std::size_t q = 0; q < nx2; ++q) {
                const double k2 = g.laplace_symbol(p, q);
                const auto m = static_cast<Eigen::Index>(g.index(p, q));
                for (Eigen::Index e = 0; e < ni; ++e) shift_inverse(e, m) = 1.0 / (lambda[e] - k2);
            }

        sigma.resize(nl);
        for (std::size_t l = 0; l < nl; ++l) sigma[l] = 1.0 + g.z()[l] / h;
    }

    std::size_t columns() const { return nc; }
    std::size_t levels() const { return nl; }

    void z_derivative(const std::vector<double>& f, std::vector<double>& out) const {
        out.resize(f.size());
        MapRows(out.data(), nl, nc).noalias() = Dz * ConstMapRows(f.data(), nl, nc);
    }

    // Applies a 1D operator along horizontal axis `axis` at every level.
    void along(const std::vector<double>& f, int axis, const Eigen::MatrixXd& op, std::vector<double>& out) const {
        out.resize(f.size());
        if (axis == 1 || grid.dim() == 1) {
            const std::size_t rows = f.size() / op.cols();
            MapRows(out.data(), rows, op.rows()).noalias() = ConstMapRows(f.data(), rows, op.cols()) * op.transpose();
        } else {
            for (std::size_t l = 0; l < nl; ++l)
                MapRows(out.data() + l * nc, nx1, nx2).noalias() = op * ConstMapRows(f.data() + l * nc, nx1, nx2);
        }
    }

    void x_derivative(const std::vector<double>& f, int axis, Parity parity, std::vector<double>& out) const {
        along(f, axis, parity == Parity::Even ? ax[axis].even_to_odd : ax[axis].odd_to_even, out);
    }

    // Flat-variable gradients of phi.
    void gradients(const std::vector<double>& phi, std::vector<double>& phi_z,
                   std::array<std::vector<double>, 2>& phi_x) const {
        z_derivative(phi, phi_z);
        for (int a = 0; a < grid.dim(); ++a) x_derivative(phi, a, Parity::Even, phi_x[a]);
    }

    // Residual operator: div(P grad phi) in the interior, phi on the surface,
    // d phi / dz on the bottom.
    void apply(const Geometry& geo, const std::vector<double>& phi, std::vector<double>& out) const {
        const int d = grid.dim();
        thread_local std::vector<double> phi_z, flux_z, tmp;
        thread_local std::array<std::vector<double>, 2> phi_x, flux_x;
        gradients(phi, phi_z, phi_x);

        flux_z.resize(phi.size());
        for (int a = 0; a < d; ++a) flux_x[a].resize(phi.size());
        for (std::size_t l = 0; l < nl; ++l) {
            const double s = sigma[l];
            for (std::size_t c = 0; c < nc; ++c) {
                const std::size_t i = l * nc + c;
                const double J = geo.jac[c];
                double rho_dot_phi = 0.0, rho2 = 0.0;
                for (int a = 0; a < d; ++a) {
                    const double rho_a = s * geo.grad_eta[a][c];
                    flux_x[a][i] = J * phi_x[a][i] - rho_a * phi_z[i];
                    rho_dot_phi += rho_a * phi_x[a][i];
                    rho2 += rho_a * rho_a;
                }
                flux_z[i] = -rho_dot_phi + (1.0 + rho2) / J * phi_z[i];
            }
        }

        z_derivative(flux_z, out);
        for (int a = 0; a < d; ++a) {
            x_derivative(flux_x[a], a, Parity::Odd, tmp);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += tmp[i];
        }
        for (std::size_t c = 0; c < nc; ++c) {
            out[c] = phi[c];
            out[(nl - 1) * nc + c] = phi_z[(nl - 1) * nc + c];
        }
    }

    // Exact inverse of the eta = 0 operator.
    void precondition(const std::vector<double>& r, std::vector<double>& out) const {
        thread_local std::vector<double> a, b;
        thread_local RowMatrix rhs, W;
        along(r, 0, ax[0].analysis, a);
        if (grid.dim() == 2) {
            along(a, 1, ax[1].analysis, b);
            a.swap(b);
        }
        b.resize(r.size());

        const Eigen::Index N = static_cast<Eigen::Index>(nl) - 1, ni = N - 1;
        ConstMapRows C(a.data(), nl, nc);
        MapRows U(b.data(), nl, nc);
        U.row(N) = (C.row(N) - d_bottom_top * C.row(0)) / d_bottom_bottom;
        rhs = C.middleRows(1, ni) - d2_top * C.row(0) - d2_bottom * U.row(N);
        W.noalias() = Vinv * rhs;
        W.array() *= shift_inverse.array();
        U.middleRows(1, ni).noalias() = V * W;
        U.row(0) = C.row(0);
        U.row(N) -= (d_bottom_row.transpose() * U.middleRows(1, ni)) / d_bottom_bottom;

        along(b, 0, ax[0].synthesis, out);
        if (grid.dim() == 2) {
            along(out, 1, ax[1].synthesis, b);
            out.swap(b);
        }
    }
};

DtnSolver::DtnSolver(const Grid& grid, DtnOptions options)
    : grid_(&grid), options_(options), impl_(std::make_unique<Impl>(grid)) {}

DtnSolver::~DtnSolver() = default;
DtnSolver::DtnSolver(DtnSolver&&) noexcept = default;

FlattenedPotential DtnSolver::harmonic_extension(const Field& eta, const Field& psi) const {
    const Grid& grid = *grid_;
    const double h = grid.config().h;
    if (eta.size() != grid.size() || psi.size() != grid.size())
        throw std::invalid_argument("harmonic_extension: field size does not match grid");

    Geometry geo;
    geo.eta = eta;
    geo.jac.resize(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (!std::isfinite(eta[c]) || !std::isfinite(psi[c]))
            throw NumericalError("dtn", "non-finite surface data");
        geo.jac[c] = 1.0 + eta[c] / h;
        if (geo.jac[c] <= 0.0) {
            std::ostringstream os;
            os << "flattening map degenerates (d rho/dz = " << geo.jac[c] << " at node " << c << ")";
            throw std::invalid_argument(os.str());
        }
    }
    const double eta_min = *std::min_element(eta.begin(), eta.end());
    if (eta_min < -0.5 * h) {
        std::ostringstream os;
        os << "surface below -h/2 (min eta = " << eta_min << ")";
        throw std::invalid_argument(os.str());
    }
    geo.grad_eta = gradient(grid, eta);
    geo.sigma = impl_->sigma;

    const std::size_t nc = grid.size(), nl = grid.nz_levels(), n = nc * nl;
    std::vector<double> b(n, 0.0);
    std::copy(psi.begin(), psi.end(), b.begin());
    const double bnorm = norm(b);

    FlattenedPotential pot;
    pot.grid = &grid;
    pot.eta = eta;
    pot.psi = psi;
    pot.jacobian = geo.jac;
    pot.grad_eta = geo.grad_eta;
    pot.sigma = geo.sigma;

    std::vector<double> x(n, 0.0);
    int total_iterations = 0;
    double rel = 0.0;
    if (bnorm > 0.0) {
        // Left-preconditioned restarted GMRES on M^-1 A x = M^-1 b, where M is
        // the flat-strip operator; the residual is then measured in solution
        // units. Starts from the flat-strip solution.
        std::vector<double> pb(n);
        impl_->precondition(b, pb);
        const double pbnorm = norm(pb);
        x = pb;
        std::vector<double> r(n), Ax(n), w(n);
        const int m = std::max(1, options_.restart);
        std::vector<std::vector<double>> V(1, std::vector<double>(n));
        std::vector<double> H((m + 1) * m), cs(m), sn(m), gvec(m + 1);
        while (true) {
            impl_->apply(geo, x, Ax);
            for (std::size_t i = 0; i < n; ++i) Ax[i] = b[i] - Ax[i];
            impl_->precondition(Ax, r);
            const double beta = norm(r);
            rel = beta / pbnorm;
            if (!std::isfinite(rel)) throw NumericalError("dtn", "GMRES residual is not finite", rel);
            if (rel <= options_.tol) break;
            if (total_iterations >= options_.max_iterations) {
                std::ostringstream os;
                os << "elliptic solve did not converge in " << total_iterations
                   << " iterations (relative residual " << rel << ")";
                throw NumericalError("dtn", os.str(), rel);
            }
            for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
            std::fill(gvec.begin(), gvec.end(), 0.0);
            gvec[0] = beta;
            int k = 0;
            while (k < m && total_iterations < options_.max_iterations) {
                ++total_iterations;
                impl_->apply(geo, V[k], Ax);
                impl_->precondition(Ax, w);
                for (int j = 0; j <= k; ++j) {
                    const double hj = dot(w, V[j]);
                    H[j * m + k] = hj;
                    for (std::size_t i = 0; i < n; ++i) w[i] -= hj * V[j][i];
                }
                const double wn = norm(w);
                H[(k + 1) * m + k] = wn;
                if (V.size() < static_cast<std::size_t>(k) + 2) V.emplace_back(n);
                if (wn > 0.0)
                    for (std::size_t i = 0; i < n; ++i) V[k + 1][i] = w[i] / wn;
                for (int j = 0; j < k; ++j) {
                    const double t = cs[j] * H[j * m + k] + sn[j] * H[(j + 1) * m + k];
                    H[(j + 1) * m + k] = -sn[j] * H[j * m + k] + cs[j] * H[(j + 1) * m + k];
                    H[j * m + k] = t;
                }
                const double a = H[k * m + k], bb = H[(k + 1) * m + k];
                const double den = std::hypot(a, bb);
                cs[k] = den > 0.0 ? a / den : 1.0;
                sn[k] = den > 0.0 ? bb / den : 0.0;
                H[k * m + k] = den;
                H[(k + 1) * m + k] = 0.0;
                gvec[k + 1] = -sn[k] * gvec[k];
                gvec[k] = cs[k] * gvec[k];
                ++k;
                if (std::abs(gvec[k]) / pbnorm <= 0.5 * options_.tol || wn == 0.0) break;
            }
            std::vector<double> y(k, 0.0);
            for (int i = k - 1; i >= 0; --i) {
                double s = gvec[i];
                for (int j = i + 1; j < k; ++j) s -= H[i * m + j] * y[j];
                y[i] = s / H[i * m + i];
            }
            for (int j = 0; j < k; ++j)
                for (std::size_t i = 0; i < n; ++i) x[i] += y[j] * V[j][i];
            // The Arnoldi estimate is the preconditioned residual; skip the
            // explicit recomputation once it is below tolerance.
            const double estimate = std::abs(gvec[k]) / pbnorm;
            if (estimate <= 0.5 * options_.tol) {
                rel = estimate;
                break;
            }
        }
    }

    pot.phi = std::move(x);
    pot.iterations = total_iterations;
    pot.residual = rel;
    impl_->gradients(pot.phi, pot.phi_z, pot.phi_x);

    const int d = grid.dim();
    pot.grad_y.resize(n);
    for (int a = 0; a < d; ++a) pot.grad_x[a].resize(n);
    for (std::size_t l = 0; l < nl; ++l) {
        for (std::size_t c = 0; c < nc; ++c) {
            const std::size_t i = l * nc + c;
            const double J = geo.jac[c];
            pot.grad_y[i] = pot.phi_z[i] / J;
            for (int a = 0; a < d; ++a)
                pot.grad_x[a][i] = pot.phi_x[a][i] - geo.sigma[l] * geo.grad_eta[a][c] * pot.phi_z[i] / J;
        }
    }
    return pot;
}

Field DtnSolver::apply(const Field& eta, const Field& psi) const {
    return dtn_from_potential(harmonic_extension(eta, psi));
}

double FlattenedPotential::rho(std::size_t l, std::size_t c) const {
    return sigma[l] * eta[c] + grid->z()[l];
}

double FlattenedPotential::speed_squared(std::size_t l, std::size_t c) const {
    const std::size_t i = at(l, c);
    double s = grad_y[i] * grad_y[i];
    for (int a = 0; a < grid->dim(); ++a) s += grad_x[a][i] * grad_x[a][i];
    return s;
}

Field FlattenedPotential::level(const std::vector<double>& data, std::size_t l) const {
    return Field(data.begin() + l * columns(), data.begin() + (l + 1) * columns());
}

FlattenedPotential harmonic_extension(const DtnSolver& solver, const Field& eta, const Field& psi) {
    return solver.harmonic_extension(eta, psi);
}

Field dtn_apply(const DtnSolver& solver, const Field& eta, const Field& psi) { return solver.apply(eta, psi); }

Field dtn_from_potential(const FlattenedPotential& pot) {
    const Grid& grid = *pot.grid;
    const std::size_t nc = grid.size();
    Field G(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        double slope2 = 0.0, cross = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            slope2 += pot.grad_eta[a][c] * pot.grad_eta[a][c];
            cross += pot.grad_eta[a][c] * pot.phi_x[a][c];
        }
        G[c] = (1.0 + slope2) / pot.jacobian[c] * pot.phi_z[c] - cross;
    }
    return G;
}

SurfaceFields surface_fields(const Grid& grid, const Field& eta, const Field& psi, const Field& G) {
    const VectorField ge = gradient(grid, eta);
    const VectorField gp = gradient(grid, psi);
    SurfaceFields out;
    out.G = G;
    out.B.resize(grid.size());
    for (int a = 0; a < grid.dim(); ++a) out.V[a].resize(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        double slope2 = 0.0, cross = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            slope2 += ge[a][c] * ge[a][c];
            cross += ge[a][c] * gp[a][c];
        }
        out.B[c] = (G[c] + cross) / (1.0 + slope2);
        for (int a = 0; a < grid.dim(); ++a) out.V[a][c] = gp[a][c] - out.B[c] * ge[a][c];
    }
    return out;
}

SurfaceFields surface_fields(const DtnSolver& solver, const Field& eta, const Field& psi) {
    return surface_fields(solver.grid(), eta, psi, solver.apply(eta, psi));
}

SurfaceFields surface_traces(const FlattenedPotential& pot) {
    SurfaceFields out;
    out.G = dtn_from_potential(pot);
    out.B = pot.level(pot.grad_y, 0);
    for (int a = 0; a < pot.grid->dim(); ++a) out.V[a] = pot.level(pot.grad_x[a], 0);
    return out;
}

Field shape_derivative(const DtnSolver& solver, const Field& eta, const Field& psi, const Field& delta_eta) {
    const Grid& grid = solver.grid();
    const SurfaceFields sf = surface_fields(solver, eta, psi);
    const Field Gb = solver.apply(eta, hadamard(sf.B, delta_eta));
    VectorField flux;
    for (int a = 0; a < grid.dim(); ++a) flux[a] = hadamard(sf.V[a], delta_eta);
    const Field div = divergence(grid, flux);
    Field out(grid.size());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = -Gb[c] - div[c];
    return out;
}

double integrate_volume(const FlattenedPotential& pot, const std::vector<double>& f) {
    const Grid& grid = *pot.grid;
    const auto& wz = grid.wz();
    const std::size_t nc = grid.size();
    Field column_integral(nc, 0.0);
    for (std::size_t l = 0; l < grid.nz_levels(); ++l)
        for (std::size_t c = 0; c < nc; ++c) column_integral[c] += wz[l] * f[l * nc + c];
    for (std::size_t c = 0; c < nc; ++c) column_integral[c] *= pot.jacobian[c];
    return integrate_Q(grid, column_integral);
}

PotentialQuadratures quadratures(const FlattenedPotential& pot) {
    const Grid& grid = *pot.grid;
    const auto& cfg = grid.config();
    const auto& wz = grid.wz();
    const std::size_t nc = grid.size(), nl = grid.nz_levels();
    const int d = grid.dim();

    std::vector<double> energy(nc * nl), vmh(nc * nl), triple(nc * nl);
    for (std::size_t l = 0; l < nl; ++l) {
        for (std::size_t c = 0; c < nc; ++c) {
            const std::size_t i = l * nc + c;
            double horiz = 0.0, cross = 0.0;
            for (int a = 0; a < d; ++a) {
                horiz += pot.grad_x[a][i] * pot.grad_x[a][i];
                cross += pot.grad_eta[a][c] * pot.grad_x[a][i];
            }
            const double vert = pot.grad_y[i] * pot.grad_y[i];
            energy[i] = vert + horiz;
            vmh[i] = vert - horiz;
            triple[i] = pot.grad_y[i] * cross;
        }
    }

    PotentialQuadratures q;
    q.volume_energy = integrate_volume(pot, energy);
    q.volume_vertical_minus_horizontal = integrate_volume(pot, vmh);
    q.volume_triple = integrate_volume(pot, triple);

    Field bottom(nc), bottom_eta(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += pot.grad_x[a][(nl - 1) * nc + c] * pot.grad_x[a][(nl - 1) * nc + c];
        bottom[c] = s;
        bottom_eta[c] = pot.eta[c] * s;
    }
    q.bottom_squared = integrate_Q(grid, bottom);
    q.bottom_eta_weighted = integrate_Q(grid, bottom_eta);

    // Wall x1 = L1: integrate |grad phi|^2 over x2 and y in [-h, eta(L1, x2)].
    auto face_column = [&](std::size_t c) {
        double s = 0.0;
        for (std::size_t l = 0; l < nl; ++l) s += wz[l] * pot.speed_squared(l, c);
        return s * pot.jacobian[c];
    };
    double wall1 = 0.0;
    for (std::size_t j = 0; j < grid.nx2(); ++j) wall1 += grid.w2()[j] * face_column(grid.index(grid.nx1() - 1, j));
    double wall2 = 0.0;
    if (d == 2)
        for (std::size_t i = 0; i < grid.nx1(); ++i) wall2 += grid.w1()[i] * face_column(grid.index(i, grid.nx2() - 1));

    q.wall_bottom = 0.5 * (cfg.L1 * wall1 + (d == 2 ? cfg.L2 * wall2 : 0.0) + cfg.h * q.bottom_squared);
    return q;
}

}  // namespace wavetank
