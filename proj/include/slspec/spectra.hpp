#ifndef SLSPEC_SPECTRA_HPP
#define SLSPEC_SPECTRA_HPP

#include <span>
#include <vector>

#include "slspec/types.hpp"

namespace slspec {

/// First N Dirichlet eigenvalues (zeros of S(pi, .)), each isolated by
/// oscillation counting so no root can be missed, then refined by Brent
/// plus a guarded Newton step using the exact lambda-derivative.
std::vector<double> dirichlet_spectrum(const Potential& q, int N,
                                       Exec exec = Exec::parallel);

/// Periodic band edges lambda_0..lambda_{2N} together with the level-2
/// companions lambda^+_1..lambda^+_{2N}. Closed gaps are emitted as exact
/// double values. Also fills gaps, omega and (for symmetric q) eps.
BandSpectrum periodic_spectrum(const Potential& q, int N,
                               Exec exec = Exec::parallel);

/// Gap intervals from the two edge sequences: even-indexed gaps from
/// consecutive lambda pairs, odd-indexed from lambda^+ pairs.
std::vector<Gap> gaps(std::span<const double> lambda,
                      std::span<const double> lambda_plus);

/// Weight numbers alpha_n = integral of S(., gamma_n)^2, by trapezoid
/// quadrature on the sample grid, cross-checked against the derivative
/// formula alpha_n = d_dot(gamma_n) * S'(pi, gamma_n).
std::vector<double> weight_numbers(const Potential& q,
                                   std::span<const double> gamma,
                                   Exec exec = Exec::parallel);

/// Eigenfunction proportionality constants beta_n = -1 / S'(pi, gamma_n).
std::vector<double> beta_sequence(const Potential& q,
                                  std::span<const double> gamma,
                                  Exec exec = Exec::parallel);

/// Ternary signs of delta at each Dirichlet eigenvalue, with a dead zone
/// mapping near-zero values to 0.
std::vector<int> omega_sequence(const Potential& q,
                                std::span<const double> gamma,
                                Exec exec = Exec::parallel);

/// Ternary gap-side sequence: 0 on closed gaps, +1/-1 when gamma_n sits at
/// the right/left endpoint of the open gap a_n. Throws when gamma_n is
/// interior to an open gap beyond tolerance (non-symmetric input).
std::vector<int> e_sequence(std::span<const double> gamma,
                            std::span<const Gap> gap_list);

/// Full Dirichlet spectral data (gamma, alpha, beta, ddot) in one pass.
DirichletSpectralData dirichlet_data(const Potential& q, int N,
                                     Exec exec = Exec::parallel);

/// Spectrum of the coupled problem with parameters (a, b), b != 0 and q
/// symmetric: eigenvalues mu (zeros of the characteristic combination r),
/// the auxiliary zeros nu of theta(pi, .), and the eta signs.
BvpBSpectrum bvpb_spectrum(const Potential& q, double a, double b, int N,
                           Exec exec = Exec::parallel);

/// r(lambda) assembled from endpoint data for given (a, b).
double bvpb_r(const Potential& q, double a, double b, double lambda);

}  // namespace slspec

#endif
