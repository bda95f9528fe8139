#ifndef SLSPEC_TESTUTIL_HPP
#define SLSPEC_TESTUTIL_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "slspec/types.hpp"

namespace testutil {

using slspec::kPi;
using slspec::Potential;

// --- witness potentials used across suites

inline Potential q_zero(int M = 1024) {
    return Potential::from_function([](double) { return 0.0; }, M);
}
inline Potential q_const(double c, int M = 1024) {
    return Potential::from_function([c](double) { return c; }, M);
}
inline Potential q_two_cos(int M = 1024) {
    return Potential::from_function([](double x) { return 2.0 * std::cos(2.0 * x); }, M);
}
inline Potential q_tent(int M = 1024) {  // |x - pi/2|, symmetric with a vertex
    return Potential::from_function([](double x) { return std::abs(x - kPi / 2); }, M);
}
inline Potential q_linear(int M = 1024) {  // asymmetric witness
    return Potential::from_function([](double x) { return x; }, M);
}
inline Potential q_asym_smooth(int M = 1024) {  // x(pi-x)sin x + x
    return Potential::from_function(
        [](double x) { return x * (kPi - x) * std::sin(x) + x; }, M);
}

// --- independent fine-step integrator (test-only oracle)
//
// Classic RK4 on the first-order system for (y, y') with an analytic
// potential callable; a deliberately different method family from the
// library's cell-exact transfer matrices.
struct OracleEndpoint {
    double C, Cp, S, Sp;
};

inline OracleEndpoint rk4_endpoint(const std::function<double(double)>& q,
                                   double lambda, int steps) {
    double h = kPi / steps;
    double c = 1, cp = 0, s = 0, sp = 1;
    auto f = [&](double x, double y, double yp, double& dy, double& dyp) {
        dy = yp;
        dyp = (q(x) - lambda) * y;
    };
    for (int i = 0; i < steps; ++i) {
        double x = i * h;
        double k1y, k1p, k2y, k2p, k3y, k3p, k4y, k4p;
        // advance C and S with one shared loop each
        f(x, c, cp, k1y, k1p);
        f(x + h / 2, c + h / 2 * k1y, cp + h / 2 * k1p, k2y, k2p);
        f(x + h / 2, c + h / 2 * k2y, cp + h / 2 * k2p, k3y, k3p);
        f(x + h, c + h * k3y, cp + h * k3p, k4y, k4p);
        double nc = c + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
        double ncp = cp + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        f(x, s, sp, k1y, k1p);
        f(x + h / 2, s + h / 2 * k1y, sp + h / 2 * k1p, k2y, k2p);
        f(x + h / 2, s + h / 2 * k2y, sp + h / 2 * k2p, k3y, k3p);
        f(x + h, s + h * k3y, sp + h * k3p, k4y, k4p);
        s = s + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
        sp = sp + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        c = nc;
        cp = ncp;
    }
    return {c, cp, s, sp};
}

/// Richardson extrapolation of the RK4 endpoint values (removes the h^4
/// term), good to ~1e-11 at a few thousand steps for smooth potentials.
inline OracleEndpoint rk4_endpoint_richardson(
    const std::function<double(double)>& q, double lambda, int steps) {
    OracleEndpoint a = rk4_endpoint(q, lambda, steps);
    OracleEndpoint b = rk4_endpoint(q, lambda, 2 * steps);
    auto comb = [](double fine, double coarse) {
        return (16.0 * fine - coarse) / 15.0;
    };
    return {comb(b.C, a.C), comb(b.Cp, a.Cp), comb(b.S, a.S), comb(b.Sp, a.Sp)};
}

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace testutil

#endif
