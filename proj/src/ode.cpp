#include "slspec/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace slspec {

// ---------------------------------------------------------------- Potential

Potential::Potential(std::vector<double> values, bool symmetric)
    : values_(std::move(values)), symmetric_(symmetric) {
    if (int(values_.size()) < 9)
        throw std::invalid_argument("Potential: need at least 9 nodes (M >= 8)");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("Potential: non-finite sample");

    // trapezoid mean; nodes are uniform so the weights are 1/2,1,...,1,1/2
    const int M = segments();
    double s = 0.5 * (values_.front() + values_.back());
    for (int i = 1; i < M; ++i) s += values_[i];
    mean_ = s / M;

    min_cell_ = std::numeric_limits<double>::infinity();
    max_cell_ = -min_cell_;
    for (int i = 0; i < M; ++i) {
        double c = cell_value(i);
        min_cell_ = std::min(min_cell_, c);
        max_cell_ = std::max(max_cell_, c);
    }

    if (symmetric_) {
        double d = symmetry_defect();
        if (d > tol::symmetry_base * (1.0 + max_abs()))
            throw std::invalid_argument(
                "Potential: symmetric claim violated, defect = " +
                std::to_string(d));
    }
}

Potential Potential::from_function(const std::function<double(double)>& f,
                                   int segments) {
    if (segments < 8) throw std::invalid_argument("Potential: M >= 8 required");
    std::vector<double> v(segments + 1);
    for (int i = 0; i <= segments; ++i) v[i] = f(kPi * i / segments);
    // certify symmetry automatically
    double defect = 0, amax = 0;
    for (int i = 0; i <= segments; ++i) {
        defect = std::max(defect, std::abs(v[i] - v[segments - i]));
        amax = std::max(amax, std::abs(v[i]));
    }
    bool sym = defect <= tol::symmetry_base * (1.0 + amax);
    return Potential(std::move(v), sym);
}

double Potential::max_abs() const {
    double m = 0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double Potential::value_at(double x) const {
    const int M = segments();
    double t = x / step();
    int i = std::clamp(int(std::floor(t)), 0, M - 1);
    double f = t - i;
    return values_[i] * (1.0 - f) + values_[i + 1] * f;
}

double Potential::symmetry_defect() const {
    double d = 0;
    const int n = nodes();
    for (int i = 0; i < n; ++i)
        d = std::max(d, std::abs(values_[i] - values_[n - 1 - i]));
    return d;
}

// ----------------------------------------------------- cell transfer matrix

namespace {

// Across one cell of width h with constant w = lambda - q_cell the state
// (y, y') propagates by [[c, s], [-w s, c]] with c = cos(sqrt(w) h) and
// s = sin(sqrt(w) h)/sqrt(w), both entire in w. The matrix has unit
// determinant identically, so the Wronskian survives to roundoff.
struct Cell {
    double c, s;
};
struct CellJet {
    double c, s, cw, sw;  // cw = dc/dw, sw = ds/dw
};

inline Cell cell_coeffs(double w, double h) {
    const double u = w * h * h;
    if (std::abs(u) < 1e-2) {
        double c = 1.0 + u * (-1.0 / 2 + u * (1.0 / 24 + u * (-1.0 / 720 + u / 40320)));
        double s = h * (1.0 + u * (-1.0 / 6 + u * (1.0 / 120 + u * (-1.0 / 5040 + u / 362880))));
        return {c, s};
    }
    if (w > 0) {
        double r = std::sqrt(w);
        return {std::cos(r * h), std::sin(r * h) / r};
    }
    double k = std::sqrt(-w);
    return {std::cosh(k * h), std::sinh(k * h) / k};
}

inline CellJet cell_coeffs_jet(double w, double h) {
    const double u = w * h * h;
    Cell base = cell_coeffs(w, h);
    if (std::abs(u) < 1e-2) {
        double cw = h * h * (-1.0 / 2 + u * (1.0 / 12 + u * (-1.0 / 240 + u / 10080)));
        double sw = h * h * h * (-1.0 / 6 + u * (1.0 / 60 + u * (-1.0 / 1680 + u / 90720)));
        return {base.c, base.s, cw, sw};
    }
    // cw = -(h/2) s and sw = (h c - s)/(2w) hold on both branches
    return {base.c, base.s, -0.5 * h * base.s, (h * base.c - base.s) / (2.0 * w)};
}

struct Mat2 {
    // column 0 = (C, C'), column 1 = (S, S')
    double a11 = 1, a12 = 0, a21 = 0, a22 = 1;
};

inline void left_multiply(Mat2& T, double c, double s, double w) {
    // T <- M * T with M = [[c, s], [-w s, c]]
    double b11 = c * T.a11 + s * T.a21;
    double b12 = c * T.a12 + s * T.a22;
    double b21 = -w * s * T.a11 + c * T.a21;
    double b22 = -w * s * T.a12 + c * T.a22;
    T = {b11, b12, b21, b22};
}

void check_finite(const EndpointData& e) {
    if (!std::isfinite(e.C_pi) || !std::isfinite(e.Cprime_pi) ||
        !std::isfinite(e.S_pi) || !std::isfinite(e.Sprime_pi))
        throw std::runtime_error("integrator failure at lambda = " +
                                 std::to_string(e.lambda));
}

// deep in the hyperbolic regime the entries grow like cosh(k pi) and the
// unit determinant is only representable to eps * |entries|^2; the failure
// threshold tracks that floor while staying at the strict tolerance in the
// oscillatory range
double wronskian_threshold(const EndpointData& e) {
    double mag = std::abs(e.C_pi * e.Sprime_pi) + std::abs(e.Cprime_pi * e.S_pi);
    return tol::wronskian + 64.0 * 1.1e-16 * mag;
}

}  // namespace

EndpointData integrate_fundamental(const Potential& q, double lambda) {
    if (!std::isfinite(lambda))
        throw std::invalid_argument("integrate_fundamental: lambda not finite");
    const int M = q.segments();
    const double h = q.step();
    Mat2 T;
    for (int i = 0; i < M; ++i) {
        double w = lambda - q.cell_value(i);
        Cell cc = cell_coeffs(w, h);
        left_multiply(T, cc.c, cc.s, w);
    }
    EndpointData e;
    e.lambda = lambda;
    e.C_pi = T.a11;
    e.Cprime_pi = T.a21;
    e.S_pi = T.a12;
    e.Sprime_pi = T.a22;
    check_finite(e);
    if (e.wronskian_residual() > wronskian_threshold(e))
        throw std::runtime_error("Wronskian lost at lambda = " +
                                 std::to_string(lambda));
    return e;
}

EndpointJet integrate_fundamental_jet(const Potential& q, double lambda) {
    if (!std::isfinite(lambda))
        throw std::invalid_argument("integrate_fundamental_jet: lambda not finite");
    const int M = q.segments();
    const double h = q.step();
    Mat2 T, D;  // D = dT/dlambda
    D.a11 = D.a22 = 0;
    for (int i = 0; i < M; ++i) {
        double w = lambda - q.cell_value(i);
        CellJet cj = cell_coeffs_jet(w, h);
        // dM/dlambda = dM/dw: [[cw, sw], [-s - w sw, cw]]
        double m21w = -cj.s - w * cj.sw;
        Mat2 Dn;
        Dn.a11 = cj.c * D.a11 + cj.s * D.a21 + cj.cw * T.a11 + cj.sw * T.a21;
        Dn.a12 = cj.c * D.a12 + cj.s * D.a22 + cj.cw * T.a12 + cj.sw * T.a22;
        Dn.a21 = -w * cj.s * D.a11 + cj.c * D.a21 + m21w * T.a11 + cj.cw * T.a21;
        Dn.a22 = -w * cj.s * D.a12 + cj.c * D.a22 + m21w * T.a12 + cj.cw * T.a22;
        D = Dn;
        left_multiply(T, cj.c, cj.s, w);
    }
    EndpointJet e;
    e.lambda = lambda;
    e.C_pi = T.a11;
    e.Cprime_pi = T.a21;
    e.S_pi = T.a12;
    e.Sprime_pi = T.a22;
    e.dC_pi = D.a11;
    e.dCprime_pi = D.a21;
    e.dS_pi = D.a12;
    e.dSprime_pi = D.a22;
    check_finite(e);
    if (e.wronskian_residual() > wronskian_threshold(e))
        throw std::runtime_error("Wronskian lost at lambda = " +
                                 std::to_string(lambda));
    return e;
}

SolutionSample eval_solution(const Potential& q, double lambda,
                             SolutionKind kind, double robin_a) {
    if (!std::isfinite(lambda))
        throw std::invalid_argument("eval_solution: lambda not finite");
    const int M = q.segments();
    const double h = q.step();
    SolutionSample out;
    out.kind = kind;
    out.lambda = lambda;
    out.robin_a = (kind == SolutionKind::theta) ? robin_a : 0.0;
    out.y.resize(M + 1);
    out.yprime.resize(M + 1);

    if (kind == SolutionKind::psi) {
        // backward from x = pi with psi(pi) = 0, psi'(pi) = -1;
        // the inverse cell matrix is [[c, -s], [w s, c]]
        double y = 0.0, yp = -1.0;
        out.y[M] = y;
        out.yprime[M] = yp;
        for (int i = M - 1; i >= 0; --i) {
            double w = lambda - q.cell_value(i);
            Cell cc = cell_coeffs(w, h);
            double ny = cc.c * y - cc.s * yp;
            double nyp = w * cc.s * y + cc.c * yp;
            y = ny;
            yp = nyp;
            out.y[i] = y;
            out.yprime[i] = yp;
        }
        return out;
    }

    double y, yp;
    switch (kind) {
        case SolutionKind::C: y = 1.0; yp = 0.0; break;
        case SolutionKind::S: y = 0.0; yp = 1.0; break;
        case SolutionKind::theta: y = 1.0; yp = robin_a; break;
        default: throw std::invalid_argument("eval_solution: bad kind");
    }
    out.y[0] = y;
    out.yprime[0] = yp;
    for (int i = 0; i < M; ++i) {
        double w = lambda - q.cell_value(i);
        Cell cc = cell_coeffs(w, h);
        double ny = cc.c * y + cc.s * yp;
        double nyp = -w * cc.s * y + cc.c * yp;
        y = ny;
        yp = nyp;
        out.y[i + 1] = y;
        out.yprime[i + 1] = yp;
    }
    return out;
}

double wronskian_residual(const Potential& q, double lambda) {
    const int M = q.segments();
    const double h = q.step();
    Mat2 T;
    for (int i = 0; i < M; ++i) {
        double w = lambda - q.cell_value(i);
        Cell cc = cell_coeffs(w, h);
        left_multiply(T, cc.c, cc.s, w);
    }
    long double det = (long double)T.a11 * T.a22 - (long double)T.a21 * T.a12;
    return std::abs(double(det - 1.0L));
}

std::vector<EndpointData> endpoint_batch(const Potential& q,
                                         std::span<const double> lambdas,
                                         Exec exec) {
    std::vector<EndpointData> out(lambdas.size());
    const long n = long(lambdas.size());
    if (exec == Exec::serial) {
        for (long i = 0; i < n; ++i) out[i] = integrate_fundamental(q, lambdas[i]);
        return out;
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out[i] = integrate_fundamental(q, lambdas[i]);
    return out;
}

namespace detail {

ShootCount shoot_count(const Potential& q, double lambda, double y0,
                       double yp0) {
    const int M = q.segments();
    const double h = q.step();
    // One zero per cell requires sqrt(w) h < pi; enforce with margin.
    if ((lambda - q.min_cell()) * h * h > 9.0)
        throw std::runtime_error(
            "oscillation count: grid too coarse for lambda = " +
            std::to_string(lambda));
    ShootCount r;
    r.y = y0;
    r.yprime = yp0;
    int prev = (y0 != 0.0) ? (y0 > 0 ? 1 : -1) : (yp0 > 0 ? 1 : -1);
    for (int i = 0; i < M; ++i) {
        double w = lambda - q.cell_value(i);
        Cell cc = cell_coeffs(w, h);
        double ny = cc.c * r.y + cc.s * r.yprime;
        double nyp = -w * cc.s * r.y + cc.c * r.yprime;
        r.y = ny;
        r.yprime = nyp;
        int s = (ny > 0) ? 1 : (ny < 0 ? -1 : -prev);
        if (s != prev) {
            ++r.sign_changes;
            prev = s;
        }
    }
    if (!std::isfinite(r.y) || !std::isfinite(r.yprime))
        throw std::runtime_error("integrator failure at lambda = " +
                                 std::to_string(lambda));
    return r;
}

double ent_cos(double z, double x) {
    double u = z * x * x;
    if (std::abs(u) < 1e-2)
        return 1.0 + u * (-1.0 / 2 + u * (1.0 / 24 + u * (-1.0 / 720 + u / 40320)));
    if (z > 0) return std::cos(std::sqrt(z) * x);
    return std::cosh(std::sqrt(-z) * x);
}

double ent_sin_over_sqrt(double z, double x) {
    double u = z * x * x;
    if (std::abs(u) < 1e-2)
        return x * (1.0 + u * (-1.0 / 6 + u * (1.0 / 120 + u * (-1.0 / 5040 + u / 362880))));
    if (z > 0) {
        double r = std::sqrt(z);
        return std::sin(r * x) / r;
    }
    double k = std::sqrt(-z);
    return std::sinh(k * x) / k;
}

}  // namespace detail

}  // namespace slspec
