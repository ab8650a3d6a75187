#include "wavetank/spectral_grid.hpp"

#include "wavetank/chebyshev.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace wavetank {

namespace {

// FFTW's planner is not re-entrant; execution on fresh arrays is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> trapezoid_weights(int n, double length) {
    std::vector<double> w(n + 1, length / n);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

// Applies `fn(line_in, line_out)` to every line of `in` along `axis`.
template <class Fn>
void along_axis(const Grid& grid, std::span<const double> in, std::span<double> out, int axis, Fn&& fn) {
    const std::size_t n1 = grid.nx1(), n2 = grid.nx2();
    if (axis == 0) {
        std::vector<double> a(n1), b(n1);
        for (std::size_t j = 0; j < n2; ++j) {
            for (std::size_t i = 0; i < n1; ++i) a[i] = in[i * n2 + j];
            fn(std::span<const double>(a), std::span<double>(b));
            for (std::size_t i = 0; i < n1; ++i) out[i * n2 + j] = b[i];
        }
    } else {
        for (std::size_t i = 0; i < n1; ++i) {
            fn(in.subspan(i * n2, n2), out.subspan(i * n2, n2));
        }
    }
}

}  // namespace

void TankConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("TankConfig: " + what); };
    if (!(L1 > 0.0)) fail("L1 must be positive");
    if (d != 1 && d != 2) fail("d must be 1 or 2");
    if (d == 2 && !(L2 > 0.0)) fail("L2 must be positive");
    if (!(h > 0.0)) fail("h must be positive");
    if (!(g > 0.0)) fail("g must be positive");
    if (n1 < 8 || !is_power_of_two(n1)) fail("n1 must be a power of two >= 8");
    if (d == 2 && (n2 < 8 || !is_power_of_two(n2))) fail("n2 must be a power of two >= 8");
    if (nz < 8) fail("nz must be >= 8");
    if (!(dt > 0.0)) fail("dt must be positive");
}

// ---------------------------------------------------------------------------
// AxisTransform

AxisTransform::AxisTransform(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("AxisTransform: need at least two modes");
    std::vector<double> a(n + 1), b(n + 1);
    std::lock_guard lock(fftw_planner_mutex());
    dct_plan_ = fftw_plan_r2r_1d(n + 1, a.data(), b.data(), FFTW_REDFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
    dst_plan_ = fftw_plan_r2r_1d(n - 1, a.data(), b.data(), FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

AxisTransform::~AxisTransform() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(dct_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(dst_plan_));
}

void AxisTransform::analyze(Parity parity, std::span<const double> nodes, std::span<double> coeffs) const {
    const int n = n_;
    if (parity == Parity::Even) {
        std::vector<double> in(nodes.begin(), nodes.end()), out(n + 1);
        fftw_execute_r2r(static_cast<fftw_plan>(dct_plan_), in.data(), out.data());
        for (int k = 0; k <= n; ++k) coeffs[k] = out[k] / n * ((k == 0 || k == n) ? 0.5 : 1.0);
    } else {
        std::vector<double> in(nodes.begin() + 1, nodes.begin() + n), out(n - 1);
        fftw_execute_r2r(static_cast<fftw_plan>(dst_plan_), in.data(), out.data());
        coeffs[0] = 0.0;
        coeffs[n] = 0.0;
        for (int k = 1; k < n; ++k) coeffs[k] = out[k - 1] / n;
    }
}

void AxisTransform::synthesize(Parity parity, std::span<const double> coeffs, std::span<double> nodes) const {
    const int n = n_;
    if (parity == Parity::Even) {
        std::vector<double> in(n + 1), out(n + 1);
        for (int k = 0; k <= n; ++k) in[k] = (k == 0 || k == n) ? coeffs[k] : 0.5 * coeffs[k];
        fftw_execute_r2r(static_cast<fftw_plan>(dct_plan_), in.data(), out.data());
        std::copy(out.begin(), out.end(), nodes.begin());
    } else {
        std::vector<double> in(n - 1), out(n - 1);
        for (int k = 1; k < n; ++k) in[k - 1] = 0.5 * coeffs[k];
        fftw_execute_r2r(static_cast<fftw_plan>(dst_plan_), in.data(), out.data());
        nodes[0] = 0.0;
        nodes[n] = 0.0;
        std::copy(out.begin(), out.end(), nodes.begin() + 1);
    }
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(const TankConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    constexpr double pi = std::numbers::pi;

    nx1_ = static_cast<std::size_t>(cfg_.n1) + 1;
    x1_.resize(nx1_);
    k1_.resize(nx1_);
    for (std::size_t i = 0; i < nx1_; ++i) {
        x1_[i] = cfg_.L1 * static_cast<double>(i) / cfg_.n1;
        k1_[i] = pi * static_cast<double>(i) / cfg_.L1;
    }
    w1_ = trapezoid_weights(cfg_.n1, cfg_.L1);
    t1_ = std::make_shared<AxisTransform>(cfg_.n1);

    if (cfg_.d == 2) {
        nx2_ = static_cast<std::size_t>(cfg_.n2) + 1;
        x2_.resize(nx2_);
        k2_.resize(nx2_);
        for (std::size_t j = 0; j < nx2_; ++j) {
            x2_[j] = cfg_.L2 * static_cast<double>(j) / cfg_.n2;
            k2_[j] = pi * static_cast<double>(j) / cfg_.L2;
        }
        w2_ = trapezoid_weights(cfg_.n2, cfg_.L2);
        t2_ = std::make_shared<AxisTransform>(cfg_.n2);
    } else {
        nx2_ = 1;
        x2_ = {0.0};
        k2_ = {0.0};
        w2_ = {1.0};
    }

    z_ = chebyshev::nodes(cfg_.nz, cfg_.h);
    wz_ = chebyshev::clenshaw_curtis_weights(cfg_.nz, cfg_.h);
}

double Grid::area() const { return cfg_.d == 2 ? cfg_.L1 * cfg_.L2 : cfg_.L1; }

double Grid::max_length() const { return cfg_.d == 2 ? std::max(cfg_.L1, cfg_.L2) : cfg_.L1; }

double Grid::laplace_symbol(std::size_t p, std::size_t q) const {
    double s = 0.0;
    if (p < nx1_ - 1) s += k1_[p] * k1_[p];
    if (cfg_.d == 2 && q < nx2_ - 1) s += k2_[q] * k2_[q];
    return s;
}

// ---------------------------------------------------------------------------
// Even extension

EvenExtension::EvenExtension(const Grid& grid, const Field& v)
    : n1_(grid.nx1() - 1), n2_(grid.nx2() - 1), nx2_(grid.nx2()), values_(v) {}

double EvenExtension::at(long j1, long j2) const {
    auto fold = [](long j, std::size_t n) -> std::size_t {
        if (n == 0) return 0;
        const long period = 2 * static_cast<long>(n);
        long r = ((j % period) + period) % period;
        if (r > static_cast<long>(n)) r = period - r;
        return static_cast<std::size_t>(r);
    };
    return values_[fold(j1, n1_) * nx2_ + fold(j2, n2_)];
}

std::vector<double> EvenExtension::periodic_values() const {
    const std::size_t p1 = period1(), p2 = period2();
    std::vector<double> out(p1 * p2);
    for (std::size_t a = 0; a < p1; ++a)
        for (std::size_t b = 0; b < p2; ++b) out[a * p2 + b] = at(static_cast<long>(a), static_cast<long>(b));
    return out;
}

Field EvenExtension::restrict() const { return values_; }

EvenExtension even_extend(const Grid& grid, const Field& v) { return EvenExtension(grid, v); }

// ---------------------------------------------------------------------------
// Transforms and calculus

Field analyze(const Grid& grid, const Field& v, Parity p1, Parity p2) {
    Field tmp(v.size()), out(v.size());
    along_axis(grid, v, tmp, 0, [&](auto a, auto b) { grid.transform(0).analyze(p1, a, b); });
    if (grid.dim() == 2) {
        along_axis(grid, tmp, out, 1, [&](auto a, auto b) { grid.transform(1).analyze(p2, a, b); });
        return out;
    }
    return tmp;
}

Field synthesize(const Grid& grid, const Field& c, Parity p1, Parity p2) {
    Field tmp(c.size()), out(c.size());
    along_axis(grid, c, tmp, 0, [&](auto a, auto b) { grid.transform(0).synthesize(p1, a, b); });
    if (grid.dim() == 2) {
        along_axis(grid, tmp, out, 1, [&](auto a, auto b) { grid.transform(1).synthesize(p2, a, b); });
        return out;
    }
    return tmp;
}

void diff(const Grid& grid, std::span<const double> v, int axis, Parity parity, std::span<double> out) {
    if (axis < 0 || axis >= grid.dim()) throw std::invalid_argument("diff: axis out of range");
    const AxisTransform& t = grid.transform(axis);
    const auto& k = axis == 0 ? grid.k1() : grid.k2();
    const int n = t.modes();
    std::vector<double> c(n + 1);
    along_axis(grid, v, out, axis, [&](std::span<const double> a, std::span<double> b) {
        t.analyze(parity, a, c);
        if (parity == Parity::Even) {
            // cos(k x)' = -k sin(k x); the Nyquist sine vanishes on the nodes.
            for (int m = 0; m <= n; ++m) c[m] = (m == 0 || m == n) ? 0.0 : -k[m] * c[m];
            t.synthesize(Parity::Odd, c, b);
        } else {
            for (int m = 0; m <= n; ++m) c[m] = (m == 0 || m == n) ? 0.0 : k[m] * c[m];
            t.synthesize(Parity::Even, c, b);
        }
    });
}

Field diff(const Grid& grid, const Field& v, int axis, Parity parity) {
    Field out(v.size());
    diff(grid, v, axis, parity, out);
    return out;
}

VectorField gradient(const Grid& grid, const Field& v) {
    VectorField g;
    for (int a = 0; a < grid.dim(); ++a) g[a] = diff(grid, v, a, Parity::Even);
    return g;
}

Field divergence(const Grid& grid, const VectorField& f) {
    Field out = diff(grid, f[0], 0, Parity::Odd);
    if (grid.dim() == 2) out = out + diff(grid, f[1], 1, Parity::Odd);
    return out;
}

double integrate_Q(const Grid& grid, const Field& v) {
    const auto& w1 = grid.w1();
    const auto& w2 = grid.w2();
    double s = 0.0;
    for (std::size_t i = 0; i < grid.nx1(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < grid.nx2(); ++j) row += w2[j] * v[grid.index(i, j)];
        s += w1[i] * row;
    }
    return s;
}

double inner(const Grid& grid, const Field& u, const Field& v) { return integrate_Q(grid, hadamard(u, v)); }

double integrate_moment(const Grid& grid, const Field& v, int axis) {
    if (axis < 0 || axis >= grid.dim()) throw std::invalid_argument("integrate_moment: axis out of range");
    const Parity p1 = axis == 0 ? Parity::Odd : Parity::Even;
    const Parity p2 = axis == 1 ? Parity::Odd : Parity::Even;
    const Field c = analyze(grid, v, p1, p2);
    const auto& cfg = grid.config();
    const std::size_t n_odd = axis == 0 ? grid.nx1() : grid.nx2();
    const double L = axis == 0 ? cfg.L1 : cfg.L2;
    const double other = grid.dim() == 2 ? (axis == 0 ? cfg.L2 : cfg.L1) : 1.0;
    const auto& k = axis == 0 ? grid.k1() : grid.k2();
    // int_0^L x sin(k_p x) dx = -L (-1)^p / k_p; only the constant mode of
    // the other axis survives.
    double s = 0.0;
    for (std::size_t p = 1; p + 1 < n_odd; ++p) {
        const double coeff = axis == 0 ? c[grid.index(p, 0)] : c[grid.index(0, p)];
        s += coeff * (p % 2 == 0 ? -L : L) / k[p];
    }
    return s * other;
}

Field dealias(const Grid& grid, const Field& v) {
    Field c = analyze(grid, v);
    const auto& cfg = grid.config();
    const double cut1 = 2.0 * cfg.n1 / 3.0;
    const double cut2 = 2.0 * cfg.n2 / 3.0;
    for (std::size_t p = 0; p < grid.nx1(); ++p)
        for (std::size_t q = 0; q < grid.nx2(); ++q)
            if (static_cast<double>(p) > cut1 || (grid.dim() == 2 && static_cast<double>(q) > cut2))
                c[grid.index(p, q)] = 0.0;
    return synthesize(grid, c);
}

Field remove_mean(const Grid& grid, const Field& v) {
    const double mean = integrate_Q(grid, v) / grid.area();
    Field out(v);
    for (double& x : out) x -= mean;
    return out;
}

double max_abs(const Field& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_norm(const Grid& grid, const VectorField& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double s = 0.0;
        for (int a = 0; a < grid.dim(); ++a) s += v[a][i] * v[a][i];
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

double l2_norm(const Grid& grid, const VectorField& v) {
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) s += inner(grid, v[a], v[a]);
    return std::sqrt(s);
}

Field operator+(const Field& a, const Field& b) {
    Field out(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Field operator-(const Field& a, const Field& b) {
    Field out(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Field operator*(double s, const Field& a) {
    Field out(a);
    for (double& x : out) x *= s;
    return out;
}

Field hadamard(const Field& a, const Field& b) {
    Field out(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

}  // namespace wavetank
