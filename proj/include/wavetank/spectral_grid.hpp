#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace wavetank {

/// Nodal values on the tank surface grid, stored row-major as [i1][i2].
/// For d = 1 the second axis has a single node.
using Field = std::vector<double>;

/// Horizontal vector field; only the first `d` components are populated.
using VectorField = std::array<Field, 2>;

enum class Parity { Even, Odd };

/// Physical tank and discretization parameters.
struct TankConfig {
    double L1 = 1.0;
    double L2 = 1.0;  // ignored when d == 1
    double h = 1.0;
    double g = 9.81;
    int d = 1;
    int n1 = 64;  // cosine modes in x1 (power of two >= 8); nodes = n1 + 1
    int n2 = 8;   // cosine modes in x2, d == 2 only
    int nz = 64;  // Chebyshev intervals in z (>= 8); levels = nz + 1
    double dt = 1e-2;
    bool dealias = true;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

class Grid;

/// Real-to-real symmetric transforms for one axis with `n` cosine modes.
///
/// Even fields are expanded as sum_k c_k cos(pi k j / n) (DCT-I, n + 1 nodes);
/// odd fields as sum_k s_k sin(pi k j / n) (DST-I on the n - 1 interior nodes).
/// Plans are created once and executed on caller buffers, so a single
/// instance may be shared between threads.
class AxisTransform {
public:
    explicit AxisTransform(int n);
    ~AxisTransform();
    AxisTransform(const AxisTransform&) = delete;
    AxisTransform& operator=(const AxisTransform&) = delete;

    int modes() const { return n_; }

    // All spans have length n + 1. For odd fields entries 0 and n of the
    // coefficient array are zero and endpoint nodal values are ignored/zeroed.
    void analyze(Parity parity, std::span<const double> nodes, std::span<double> coeffs) const;
    void synthesize(Parity parity, std::span<const double> coeffs, std::span<double> nodes) const;

private:
    int n_;
    void* dct_plan_ = nullptr;
    void* dst_plan_ = nullptr;
};

/// Collocation grid on Q with the vertical Chebyshev levels used by the
/// elliptic solver.
class Grid {
public:
    explicit Grid(const TankConfig& cfg);

    const TankConfig& config() const { return cfg_; }
    int dim() const { return cfg_.d; }

    std::size_t nx1() const { return nx1_; }
    std::size_t nx2() const { return nx2_; }
    std::size_t size() const { return nx1_ * nx2_; }
    std::size_t nz_levels() const { return z_.size(); }
    std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * nx2_ + i2; }

    const std::vector<double>& x1() const { return x1_; }
    const std::vector<double>& x2() const { return x2_; }
    const std::vector<double>& k1() const { return k1_; }
    const std::vector<double>& k2() const { return k2_; }
    const std::vector<double>& w1() const { return w1_; }
    const std::vector<double>& w2() const { return w2_; }

    /// Chebyshev levels, z[0] = 0 (surface) down to z[nz] = -h (bottom).
    const std::vector<double>& z() const { return z_; }
    /// Clenshaw-Curtis weights on [-h, 0].
    const std::vector<double>& wz() const { return wz_; }

    double area() const;
    double max_length() const;

    /// Total squared wavenumber of mode (p, q) as seen by the discrete
    /// second derivative (the Nyquist mode of each axis is annihilated).
    double laplace_symbol(std::size_t p, std::size_t q) const;

    const AxisTransform& transform(int axis) const { return axis == 0 ? *t1_ : *t2_; }

    Field zeros() const { return Field(size(), 0.0); }
    Field constant(double c) const { return Field(size(), c); }

    /// Samples f(x1, x2) at the nodes (x2 = 0 when d == 1).
    template <class F>
    Field sample(F&& f) const {
        Field out(size());
        for (std::size_t i = 0; i < nx1_; ++i)
            for (std::size_t j = 0; j < nx2_; ++j) out[index(i, j)] = f(x1_[i], x2_[j]);
        return out;
    }

private:
    TankConfig cfg_;
    std::size_t nx1_ = 0, nx2_ = 1;
    std::vector<double> x1_, x2_, k1_, k2_, w1_, w2_, z_, wz_;
    std::shared_ptr<const AxisTransform> t1_, t2_;
};

/// The 2L-periodic even extension of a grid field, sampled on the doubled
/// uniform grid. Node indices may be any integer; they wrap with period 2n
/// and reflect about 0.
class EvenExtension {
public:
    EvenExtension(const Grid& grid, const Field& v);

    std::size_t period1() const { return 2 * n1_; }
    std::size_t period2() const { return n2_ == 0 ? 1 : 2 * n2_; }

    double at(long j1, long j2 = 0) const;

    /// Values on the full periodic grid, [j1][j2] with j in [0, 2n).
    std::vector<double> periodic_values() const;

    /// Restriction back to Q.
    Field restrict() const;

private:
    std::size_t n1_, n2_, nx2_;
    Field values_;
};

EvenExtension even_extend(const Grid& grid, const Field& v);

/// Cosine (or sine, for odd parity along an axis) coefficients of a field,
/// laid out like the nodal array: entry (p, q) multiplies the p-th basis
/// function in x1 and the q-th in x2.
Field analyze(const Grid& grid, const Field& v, Parity p1 = Parity::Even, Parity p2 = Parity::Even);
Field synthesize(const Grid& grid, const Field& c, Parity p1 = Parity::Even, Parity p2 = Parity::Even);

/// Spectral derivative along `axis` (0 or 1). The parity along that axis flips.
Field diff(const Grid& grid, const Field& v, int axis, Parity parity = Parity::Even);
void diff(const Grid& grid, std::span<const double> v, int axis, Parity parity, std::span<double> out);

/// Horizontal gradient of an even field.
VectorField gradient(const Grid& grid, const Field& v);

/// Divergence of a horizontal vector field whose component a is odd in x_a.
Field divergence(const Grid& grid, const VectorField& f);

/// Trapezoidal quadrature over Q, exact on every cosine mode below Nyquist.
double integrate_Q(const Grid& grid, const Field& v);

/// integrate_Q of the pointwise product.
double inner(const Grid& grid, const Field& u, const Field& v);

/// int_Q x_axis v dx for v odd along `axis`, evaluated exactly on the sine
/// series of v (the trapezoid rule loses accuracy on x v at the far wall).
double integrate_moment(const Grid& grid, const Field& v, int axis);

/// Zeroes cosine modes above two thirds of the axis mode count.
Field dealias(const Grid& grid, const Field& v);

/// Removes the area-weighted mean.
Field remove_mean(const Grid& grid, const Field& v);

double max_abs(const Field& v);

/// max over nodes of |grad v|.
double max_norm(const Grid& grid, const VectorField& v);

/// L2(Q) norm of a vector field.
double l2_norm(const Grid& grid, const VectorField& v);

/// Pointwise helpers used across modules.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field hadamard(const Field& a, const Field& b);

}  // namespace wavetank
