#pragma once

// Harmonic extension of the surface potential into the fluid and the
// Dirichlet-to-Neumann operator G(eta).
//
// The fluid domain {-h <= y <= eta(x)} is flattened onto the strip
// [-h, 0] by y = rho(x, z) = (1 + z/h) eta(x) + z. In the flat variables
// Laplace's equation becomes div(P grad phi) = 0 with
//
//     P = [ J I        -grad rho          ]     J = d rho / dz = 1 + eta/h
//         [ -grad rho  (1+|grad rho|^2)/J ]
//
// discretized with the cosine basis of the even extension in x and
// Chebyshev collocation in z, and solved by GMRES preconditioned with the
// exact flat-strip (eta = 0) solve, which is diagonal in the cosine modes.

#include "wavetank/spectral_grid.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavetank {

/// A solver or integrator could not produce a finite answer.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string stage, const std::string& what, double residual = 0.0)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), residual_(residual) {}
    const std::string& stage() const { return stage_; }
    double residual() const { return residual_; }

private:
    std::string stage_;
    double residual_;
};

struct DtnOptions {
    double tol = 1e-10;  // relative residual of the elliptic solve
    int max_iterations = 400;
    int restart = 40;
};

/// Solution of the flattened Laplace problem for one (eta, psi).
/// Level-major storage: value(l, c) = data[l * columns + c], level 0 is the
/// free surface and the last level the bottom.
struct FlattenedPotential {
    const Grid* grid = nullptr;
    Field eta;
    Field psi;
    Field jacobian;                  // d rho / dz per column
    VectorField grad_eta;            // horizontal gradient of eta
    std::vector<double> sigma;       // 1 + z_l / h per level
    std::vector<double> phi;
    std::vector<double> phi_z;       // d phi / dz in flat variables
    std::array<std::vector<double>, 2> phi_x;  // d phi / dx_a in flat variables
    std::array<std::vector<double>, 2> grad_x; // physical horizontal velocity
    std::vector<double> grad_y;      // physical vertical velocity
    int iterations = 0;
    double residual = 0.0;           // final relative residual

    std::size_t columns() const { return grid->size(); }
    std::size_t levels() const { return grid->nz_levels(); }
    std::size_t at(std::size_t l, std::size_t c) const { return l * columns() + c; }

    /// rho(x_c, z_l)
    double rho(std::size_t l, std::size_t c) const;

    /// |grad_{x,y} phi|^2 at a node.
    double speed_squared(std::size_t l, std::size_t c) const;

    /// Copy of one level as a surface field.
    Field level(const std::vector<double>& data, std::size_t l) const;
};

/// Traces of the velocity at the free surface.
struct SurfaceFields {
    Field B;        // vertical velocity at y = eta
    VectorField V;  // horizontal velocity at y = eta
    Field G;        // G(eta) psi
};

/// Boundary and volume quadratures of a solved potential.
struct PotentialQuadratures {
    /// (1/2) int_R |grad phi|^2 (x, y).n dS over the walls x_a = L_a and the bottom.
    double wall_bottom = 0.0;
    /// int_Q eta |grad_x phi|^2 (x, -h) dx
    double bottom_eta_weighted = 0.0;
    /// int_Q |grad_x phi|^2 (x, -h) dx
    double bottom_squared = 0.0;
    /// iint_Omega |grad_{x,y} phi|^2
    double volume_energy = 0.0;
    /// iint_Omega (phi_y^2 - |grad_x phi|^2)
    double volume_vertical_minus_horizontal = 0.0;
    /// iint_Omega phi_y (grad eta . grad_x phi)
    double volume_triple = 0.0;
};

class DtnSolver {
public:
    explicit DtnSolver(const Grid& grid, DtnOptions options = {});
    ~DtnSolver();
    DtnSolver(DtnSolver&&) noexcept;
    DtnSolver& operator=(DtnSolver&&) = delete;

    const Grid& grid() const { return *grid_; }
    const DtnOptions& options() const { return options_; }

    /// Throws std::invalid_argument if eta < -h/2 anywhere or the map
    /// (x, z) -> (x, rho) degenerates; NumericalError if GMRES stalls.
    FlattenedPotential harmonic_extension(const Field& eta, const Field& psi) const;

    Field apply(const Field& eta, const Field& psi) const;

private:
    struct Impl;
    const Grid* grid_;
    DtnOptions options_;
    std::unique_ptr<Impl> impl_;
};

FlattenedPotential harmonic_extension(const DtnSolver& solver, const Field& eta, const Field& psi);

/// G(eta) psi = (phi_y - grad eta . grad_x phi) at y = eta.
Field dtn_apply(const DtnSolver& solver, const Field& eta, const Field& psi);

/// G psi read off an already solved potential.
Field dtn_from_potential(const FlattenedPotential& pot);

/// B and V from G psi and the surface gradients.
SurfaceFields surface_fields(const Grid& grid, const Field& eta, const Field& psi, const Field& G);
SurfaceFields surface_fields(const DtnSolver& solver, const Field& eta, const Field& psi);

/// B and V read directly off the potential's velocity at level 0.
SurfaceFields surface_traces(const FlattenedPotential& pot);

/// First variation of G(eta) psi in the direction delta_eta:
/// -G(eta)(B delta_eta) - div(V delta_eta).
Field shape_derivative(const DtnSolver& solver, const Field& eta, const Field& psi, const Field& delta_eta);

PotentialQuadratures quadratures(const FlattenedPotential& pot);

/// iint_Omega f(x, y) dy dx with f sampled on the flattened nodes.
double integrate_volume(const FlattenedPotential& pot, const std::vector<double>& f);

}  // namespace wavetank
