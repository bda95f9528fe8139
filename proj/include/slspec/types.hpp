#ifndef SLSPEC_TYPES_HPP
#define SLSPEC_TYPES_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace slspec {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Execution policy for the data-parallel kernels. The serial path is the
/// reference implementation; the parallel path distributes the same
/// per-item work across OpenMP threads and produces bit-identical results.
enum class Exec { serial, parallel };

/// Thrown when input data fails one of the solvability/characterization
/// conditions (interlacing, positivity, band-maximum, sequence membership).
class characterization_error : public std::runtime_error {
public:
    characterization_error(std::string condition, const std::string& what_arg)
        : std::runtime_error(what_arg), condition_(std::move(condition)) {}
    const std::string& condition() const { return condition_; }

private:
    std::string condition_;
};

// Tolerances used across the library. Index-dependent ones grow like n^2,
// matching the natural scale of the n-th eigenvalue.
namespace tol {
inline constexpr double wronskian = 1e-9;
inline constexpr double trace_identity = 1e-9;
inline constexpr double endpoint_ic = 1e-12;
inline constexpr double weight_crosscheck_rel = 1e-6;
inline constexpr double golden_interval = 1e-10;
inline constexpr double realizability_margin = -1e-6;
inline constexpr double gl_row_residual = 1e-8;
inline constexpr double symmetry_base = 1e-10;  // * (1 + max|q|)

inline double double_root(int n) { return 1e-7 * (1.0 + double(n) * n); }
inline double gap_closed(int n) { return 1e-7 * (1.0 + double(n) * n); }
inline double dead_zone(int n) { return 1e-6 * (1.0 + double(n) * n); }
inline double eigen_atol(int n) { return 1e-9 * (1.0 + double(n) * n); }
}  // namespace tol

/// Real-valued potential on (0, pi), stored as samples at M+1 uniform
/// nodes. Between nodes the potential is treated as piecewise constant on
/// cells, with the cell value the average of the two node samples.
class Potential {
public:
    /// Takes ownership of node samples; M = values.size()-1 >= 8.
    /// A true `symmetric` claim is certified against the reversal defect.
    explicit Potential(std::vector<double> values, bool symmetric = false);

    static Potential from_function(const std::function<double(double)>& f,
                                   int segments = 1024);

    int segments() const { return int(values_.size()) - 1; }
    int nodes() const { return int(values_.size()); }
    double step() const { return kPi / segments(); }
    double node(int i) const { return step() * i; }
    const std::vector<double>& values() const { return values_; }

    /// Average value (1/pi) * integral of q, by trapezoid quadrature.
    double mean() const { return mean_; }
    bool symmetric() const { return symmetric_; }

    double cell_value(int i) const {
        return 0.5 * (values_[i] + values_[i + 1]);
    }
    double min_cell() const { return min_cell_; }
    double max_cell() const { return max_cell_; }
    double max_abs() const;

    /// Linear interpolation between nodes (used by mesh-based consumers).
    double value_at(double x) const;

    /// Max over nodes of |q(x) - q(pi - x)|.
    double symmetry_defect() const;

private:
    std::vector<double> values_;
    double mean_ = 0;
    double min_cell_ = 0, max_cell_ = 0;
    bool symmetric_ = false;
};

/// Values of the fundamental solutions C, S and their derivatives at
/// x = pi for one value of the spectral parameter.
struct EndpointData {
    double lambda = 0;
    double C_pi = 0, Cprime_pi = 0, S_pi = 0, Sprime_pi = 0;

    double Delta() const { return 0.5 * (C_pi + Sprime_pi); }
    double delta() const { return 0.5 * (C_pi - Sprime_pi); }
    double p() const { return 1.0 - Delta(); }
    double p_plus() const { return p() - 2.0; }
    double d() const { return S_pi; }
    double d1() const { return Cprime_pi; }

    // residuals are accumulated in extended precision: the defect of the
    // computed entries is the quantity of interest, not the rounding of
    // one final large-magnitude subtraction
    double wronskian_residual() const {
        long double w = (long double)C_pi * Sprime_pi -
                        (long double)Cprime_pi * S_pi - 1.0L;
        return std::abs(double(w));
    }
    /// Residual of Delta^2 - delta^2 - d*d1 = 1 (equivalent to the
    /// Wronskian identity, asserted independently).
    double trace_identity_residual() const {
        long double D = 0.5L * ((long double)C_pi + Sprime_pi);
        long double dl = 0.5L * ((long double)C_pi - Sprime_pi);
        long double r = D * D - dl * dl - (long double)S_pi * Cprime_pi - 1.0L;
        return std::abs(double(r));
    }
};

/// EndpointData together with d/dlambda of every entry.
struct EndpointJet : EndpointData {
    double dC_pi = 0, dCprime_pi = 0, dS_pi = 0, dSprime_pi = 0;

    double Delta_dot() const { return 0.5 * (dC_pi + dSprime_pi); }
    double delta_dot() const { return 0.5 * (dC_pi - dSprime_pi); }
    double d_dot() const { return dS_pi; }
    double d1_dot() const { return dCprime_pi; }
};

enum class SolutionKind { C, S, psi, theta };

/// One solution of the equation sampled on the potential's grid.
struct SolutionSample {
    SolutionKind kind = SolutionKind::C;
    double lambda = 0;
    double robin_a = 0;  // meaningful only for kind == theta
    std::vector<double> y, yprime;
};

enum class GapClass { closed, open };
enum class GammaSide { left, right, none };

/// Interval between paired band-edge eigenvalues.
struct Gap {
    double left = 0, right = 0;
    GapClass cls = GapClass::closed;
    GammaSide gamma_side = GammaSide::none;

    double length() const { return right - left; }
    double midpoint() const { return 0.5 * (left + right); }
};

/// Dirichlet eigenvalues with weight numbers, eigenfunction ratios and
/// the derivative of the characteristic function at each eigenvalue.
struct DirichletSpectralData {
    std::vector<double> gamma;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> ddot;

    void validate() const;  // interlacing, positivity, sign pattern, ratio identity
};

/// Periodic band edges, their level-2 companions, gap classification and
/// the ternary sign sequences.
struct BandSpectrum {
    std::vector<double> lambda;       // lambda_0 .. lambda_{2N}
    std::vector<double> lambda_plus;  // lambda^+_1 .. lambda^+_{2N}
    std::vector<Gap> gaps;            // a_1 .. a_{2N}
    std::vector<int> omega;           // entries in {-1,0,1}
    std::vector<int> eps;             // entries in {-1,0,1}; empty if undefined

    void validate() const;  // orderings and interlacing
};

/// Spectrum of the coupled Robin-type problem with parameters (a, b).
struct BvpBSpectrum {
    double a = 0, b = 1;
    double h = 0;  // 4a + integral of q
    std::vector<double> mu;   // eigenvalues, ascending, multiplicities kept
    std::vector<double> nu;   // zeros of theta(pi, .)
    std::vector<int> eta;     // ternary signs at the nu's

    void validate() const;  // mu_n < mu_{n+2}
};

}  // namespace slspec

#endif
