#ifndef SLSPEC_ORACLE_HPP
#define SLSPEC_ORACLE_HPP

#include <vector>

#include "slspec/types.hpp"

namespace slspec {

enum class BoundaryCondition { dirichlet, periodic, antiperiodic_like, bvpb };

/// Lowest N eigenvalues of the central-difference discretization of
/// -y'' + q y on mesh width pi/M, Richardson-extrapolated from meshes M
/// and 2M. Deliberately a different method family from the shooting
/// pipeline, so agreement between the two is evidence, not tautology.
/// `antiperiodic_like` couples y(0) = -y(pi), y'(0) = -y'(pi), whose
/// eigenvalues are the level-2 edges of the periodic problem. (a, b) are
/// used only for the bvpb condition.
std::vector<double> matrix_spectrum(const Potential& q, BoundaryCondition bc,
                                    int M, int N, double a = 0, double b = 0,
                                    Exec exec = Exec::parallel);

}  // namespace slspec

#endif
