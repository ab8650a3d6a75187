#pragma once

// Chebyshev-Gauss-Lobatto discretization of the vertical interval [-h, 0].
// Level l sits at z_l = (h/2)(cos(pi l / nz) - 1), so l = 0 is the surface.

#include "wavetank/spectral_grid.hpp"

#include <span>
#include <vector>

namespace wavetank::chebyshev {

std::vector<double> nodes(int nz, double h);

std::vector<double> clenshaw_curtis_weights(int nz, double h);

/// Dense first-derivative matrix in z, row-major (nz+1) x (nz+1).
std::vector<double> derivative_matrix(int nz, double h);

/// d/dz of nodal values through the coefficient recurrence, O(nz log nz).
class Differentiator {
public:
    Differentiator(int nz, double h);

    int intervals() const { return transform_.modes(); }
    void apply(std::span<const double> values, std::span<double> derivative) const;

private:
    AxisTransform transform_;
    double scale_;
};

}  // namespace wavetank::chebyshev
