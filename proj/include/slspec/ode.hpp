#ifndef SLSPEC_ODE_HPP
#define SLSPEC_ODE_HPP

#include <span>
#include <vector>

#include "slspec/types.hpp"

namespace slspec {

/// Propagates -y'' + q y = lambda y across [0, pi] with a cell-wise exact
/// transfer-matrix scheme (the potential is piecewise constant per cell)
/// and returns the endpoint values of the fundamental solutions C and S.
/// Throws std::runtime_error if the propagation loses the Wronskian.
EndpointData integrate_fundamental(const Potential& q, double lambda);

/// Same propagation carrying d/dlambda of the transfer matrices, so the
/// lambda-derivatives of the endpoint values are exact for the sampled
/// potential (no finite differencing).
EndpointJet integrate_fundamental_jet(const Potential& q, double lambda);

/// Solution sampled on the potential's grid. psi is propagated backward
/// from x = pi; robin_a is required exactly for kind == theta.
SolutionSample eval_solution(const Potential& q, double lambda,
                             SolutionKind kind, double robin_a = 0.0);

/// |<C,S>(pi) - 1|, without the validation throw.
double wronskian_residual(const Potential& q, double lambda);

/// Endpoint data for many lambda values; policy selects the serial
/// reference loop or the OpenMP one (results are bit-identical).
std::vector<EndpointData> endpoint_batch(const Potential& q,
                                         std::span<const double> lambdas,
                                         Exec exec = Exec::parallel);

namespace detail {

/// Streaming propagation of one solution that records only the number of
/// node-to-node sign changes and the terminal values. Used by the
/// oscillation-counting eigenvalue brackets.
struct ShootCount {
    double y = 0, yprime = 0;
    int sign_changes = 0;
};
ShootCount shoot_count(const Potential& q, double lambda, double y0,
                       double yp0);

/// Entire-in-z helpers: cos(sqrt(z)x) and sin(sqrt(z)x)/sqrt(z) continued
/// through z <= 0 (hyperbolic branch), stable near z = 0.
double ent_cos(double z, double x);
double ent_sin_over_sqrt(double z, double x);

}  // namespace detail

}  // namespace slspec

#endif
