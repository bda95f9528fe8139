#ifndef SLSPEC_INVERSE_HPP
#define SLSPEC_INVERSE_HPP

#include <span>
#include <vector>

#include "slspec/types.hpp"

namespace slspec {

/// Discretized transformation-kernel workspace: the input kernel F on the
/// grid, the recovered diagonal K(x, x), and the per-row residuals of the
/// solved integral equation.
struct GLWorkspace {
    int M = 0;
    std::vector<double> F;             // (M+1) x (M+1), row-major, symmetric
    std::vector<double> K_diag;        // K(x_i, x_i); K_diag[0] == 0
    std::vector<double> row_residual;  // max-norm residual per x row

    double F_at(int i, int j) const { return F[size_t(i) * (M + 1) + j]; }
};

/// Core reconstruction: builds the kernel from spectral data, solves the
/// second-kind integral equation row by row (each row is an independent
/// dense solve, distributed across threads), and differentiates the
/// diagonal. Exposed separately so its invariants are testable.
GLWorkspace gl_reconstruct(std::span<const double> gamma,
                           std::span<const double> alpha, int M,
                           Exec exec = Exec::parallel);

/// Potential from Dirichlet spectral data (gamma_n, alpha_n), n = 1..N,
/// N >= 16. q = 2 d/dx K(x,x) on an M-cell grid.
Potential solve_ip1(std::span<const double> gamma,
                    std::span<const double> alpha, int M = 512,
                    Exec exec = Exec::parallel);

/// Symmetric potential from the Dirichlet spectrum alone: the weights are
/// produced from the product form of d, alpha_n = (-1)^n d_dot(gamma_n).
Potential solve_ip3(std::span<const double> gamma, int M = 512,
                    Exec exec = Exec::parallel);

/// Potential from the periodic spectrum, the Dirichlet spectrum and the
/// gap-side signs omega: weights from the discriminant of the p-product.
Potential solve_ip2(std::span<const double> lambda,
                    std::span<const double> gamma, std::span<const int> omega,
                    int M = 512, Exec exec = Exec::parallel);

/// Symmetric potential from the periodic spectrum and the E-sequence:
/// recovers the level-2 edges from the p-product, places each gamma_n at
/// the E-designated gap endpoint, then reduces to the Dirichlet-spectrum
/// reconstruction.
Potential solve_ip4(std::span<const double> lambda, std::span<const int> eps,
                    int M = 512, Exec exec = Exec::parallel);

/// Even reflection average (q(x) + q(pi - x))/2, certified symmetric.
Potential symmetrized(const Potential& q);

/// L2(0, pi) distance between two potentials (trapezoid quadrature on the
/// finer grid, linear interpolation of the other).
double l2_distance(const Potential& A, const Potential& B);

}  // namespace slspec

#endif
