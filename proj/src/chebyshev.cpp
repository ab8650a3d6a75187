#include "wavetank/chebyshev.hpp"

#include <cmath>
#include <numbers>

namespace wavetank::chebyshev {

std::vector<double> nodes(int nz, double h) {
    std::vector<double> z(nz + 1);
    for (int l = 0; l <= nz; ++l) z[l] = 0.5 * h * (std::cos(std::numbers::pi * l / nz) - 1.0);
    z[0] = 0.0;
    z[nz] = -h;
    return z;
}

std::vector<double> clenshaw_curtis_weights(int nz, double h) {
    const double pi = std::numbers::pi;
    const int n = nz;
    std::vector<double> w(n + 1, 0.0);
    std::vector<double> v(n + 1, 1.0);
    if (n % 2 == 0) {
        w[0] = w[n] = 1.0 / (n * n - 1.0);
        for (int k = 1; k < n / 2; ++k)
            for (int l = 1; l < n; ++l) v[l] -= 2.0 * std::cos(2.0 * k * pi * l / n) / (4.0 * k * k - 1.0);
        for (int l = 1; l < n; ++l) v[l] -= std::cos(pi * l) / (n * n - 1.0);
    } else {
        w[0] = w[n] = 1.0 / (static_cast<double>(n) * n);
        for (int k = 1; k <= (n - 1) / 2; ++k)
            for (int l = 1; l < n; ++l) v[l] -= 2.0 * std::cos(2.0 * k * pi * l / n) / (4.0 * k * k - 1.0);
    }
    for (int l = 1; l < n; ++l) w[l] = 2.0 * v[l] / n;
    for (double& x : w) x *= 0.5 * h;
    return w;
}

std::vector<double> derivative_matrix(int nz, double h) {
    const int n = nz;
    const double pi = std::numbers::pi;
    std::vector<double> s(n + 1), c(n + 1);
    for (int l = 0; l <= n; ++l) {
        s[l] = std::cos(pi * l / n);
        c[l] = ((l == 0 || l == n) ? 2.0 : 1.0) * ((l % 2) ? -1.0 : 1.0);
    }
    std::vector<double> d((n + 1) * (n + 1), 0.0);
    for (int i = 0; i <= n; ++i) {
        double row = 0.0;
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            const double v = c[i] / c[j] / (s[i] - s[j]);
            d[i * (n + 1) + j] = v;
            row += v;
        }
        // negative-sum trick for the diagonal
        d[i * (n + 1) + i] = -row;
    }
    const double scale = 2.0 / h;
    for (double& x : d) x *= scale;
    return d;
}

Differentiator::Differentiator(int nz, double h) : transform_(nz), scale_(2.0 / h) {}

void Differentiator::apply(std::span<const double> values, std::span<double> derivative) const {
    const int n = transform_.modes();
    std::vector<double> a(n + 1), b(n + 2, 0.0);
    transform_.analyze(Parity::Even, values, a);
    // T_k' recurrence: b_{k-1} = b_{k+1} + 2 k a_k, with b_0 halved.
    for (int k = n; k >= 1; --k) b[k - 1] = b[k + 1] + 2.0 * k * a[k];
    b[0] *= 0.5;
    for (int k = 0; k <= n; ++k) b[k] *= scale_;
    transform_.synthesize(Parity::Even, std::span<const double>(b.data(), n + 1), derivative);
}

}  // namespace wavetank::chebyshev
