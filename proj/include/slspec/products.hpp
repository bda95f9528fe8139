#ifndef SLSPEC_PRODUCTS_HPP
#define SLSPEC_PRODUCTS_HPP

#include <span>
#include <vector>

#include "slspec/types.hpp"

namespace slspec {

enum class ProductKind { p, d, r };

enum class AsymptoticModel {
    periodic_pairs,      // band edges against (2n)^2 + alpha
    antiperiodic_pairs,  // level-2 edges against (2n-1)^2 + alpha
    dirichlet,           // gamma_n against n^2 + alpha
    weights,             // alpha_n against pi/(2 n^2) (1 + kappa_n / n)
    bvpb                 // mu_n against n^2 + (h -+ 4b)/pi
};

struct AsymptoticFit {
    double alpha = 0;          // fitted mean constant (models with one constant)
    double delta = 0;          // fitted 1/n remainder coefficient
    double beta = 0;           // fitted 1/n^2 remainder coefficient
    double h = 0, b = 0;       // fitted constants of the bvpb model
    std::vector<double> kappa; // per-term remainders against the constant
    bool diverging = false;    // remainders drift: model violation
};

/// Fits the model's constant(s) by least squares over the tail half of the
/// sequence (low indices carry the large transients) and returns the
/// remainders for every term.
AsymptoticFit asymptotic_fit(std::span<const double> seq, AsymptoticModel model);

/// Evaluates a characteristic function from its zero sequence via the
/// truncated infinite product. Retained factors are taken verbatim; the
/// dropped tail is replaced by the closed form of the constant-potential
/// reference whose zeros share the sequence's fitted asymptotics, so the
/// truncation error decays with the remainder tail rather than like 1/N.
class ProductEvaluator {
public:
    /// d(lambda) from Dirichlet eigenvalues (at least 16, increasing).
    static ProductEvaluator dirichlet(std::vector<double> gamma);
    /// p(lambda) from band edges lambda_0..lambda_{2N}.
    static ProductEvaluator periodic(std::vector<double> lambda);
    /// r(lambda) from bvpb eigenvalues mu_0..mu_{N-1} and the coupling b.
    static ProductEvaluator bvpb(std::vector<double> mu, double b);

    double eval(double lambda) const;
    double operator()(double lambda) const { return eval(lambda); }

    /// Derivative of d at its n-th zero (n is 1-based), via the
    /// one-factor-removed product. Kind d only.
    double derivative_at_zero(int n) const;

    ProductKind kind() const { return kind_; }
    int terms() const { return int(zeros_.size()); }
    const std::vector<double>& zeros() const { return zeros_; }
    double tail_constant() const { return tail_const_; }
    double coupling_b() const { return b_; }
    /// Range within which the tail model is validated (advisory).
    double validated_max() const;

private:
    ProductEvaluator() = default;
    ProductKind kind_ = ProductKind::d;
    std::vector<double> zeros_;
    double tail_const_ = 0;          // fitted alpha (p, d) or h (r)
    double tail_delta_ = 0;          // fitted 1/n coefficient (p, d)
    double tail_beta_ = 0;           // fitted 1/n^2 coefficient (p, d)
    double b_ = 0;                   // r only
    std::vector<double> ref_zeros_;  // r only: zeros of the reference form

    double tail_d(double z) const;   // corrected dropped-tail factor, d form
    double tail_p(double zeta) const;
};

/// One line of a characterization-condition report.
struct BandCheckRecord {
    int n = 0;
    double left = 0, right = 0;
    double peak_lambda = 0;
    double peak_value = 0;
    double margin = 0;
    bool pass = false;
};

/// For each interval between consecutive zeros [lambda_{2n}, lambda_{2n+1}]
/// of p, the maximum of p and its margin over the level 2. A negative
/// margin beyond tolerance means the sequence is not a periodic spectrum.
std::vector<BandCheckRecord> check_band_realizability(const ProductEvaluator& p);

/// Same for the coupled problem: maxima of |r| over the Q_n intervals
/// against the level 4|b|.
std::vector<BandCheckRecord> check_bvpb_realizability(const ProductEvaluator& r);

/// Zeros of p - 2 (the level-2 edges), resolved pairwise inside each
/// interval [lambda_{2k}, lambda_{2k+1}]; closed pairs come out as exact
/// doubles. Returns lambda^+_1..lambda^+_{2*pairs}.
std::vector<double> plus_edges_from_p(const ProductEvaluator& p, int pairs);

}  // namespace slspec

#endif
