#ifndef SLSPEC_ROOTFIND_HPP
#define SLSPEC_ROOTFIND_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace slspec::detail {

using Fn = std::function<double(double)>;

/// Brent's method on a sign-changing bracket [a, b].
inline double brent_root(const Fn& f, double a, double b, double fa, double fb,
                         double xtol, int max_iter = 200) {
    if (fa == 0) return a;
    if (fb == 0) return b;
    if ((fa > 0) == (fb > 0))
        throw std::runtime_error("brent_root: no sign change in bracket");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0) == (fc > 0)) {
            c = a; fc = fa; d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
        double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, qq;
            if (a == c) {
                p = 2.0 * xm * s;
                qq = 1.0 - s;
            } else {
                double r = fb / fc, t = fa / fc;
                p = s * (2.0 * xm * t * (t - r) - (b - a) * (r - 1.0));
                qq = (t - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) qq = -qq;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * qq - std::abs(tol1 * qq),
                                   std::abs(e * qq))) {
                e = d;
                d = p / qq;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

/// One or two guarded Newton corrections inside [lo, hi]; falls back to the
/// Brent result if the step leaves the bracket or the derivative is tiny.
inline double newton_polish(double x, double lo, double hi, const Fn& f,
                            const Fn& fprime, int steps = 2) {
    for (int i = 0; i < steps; ++i) {
        double fp = fprime(x);
        if (!std::isfinite(fp) || fp == 0.0) return x;
        double xn = x - f(x) / fp;
        if (!(xn > lo && xn < hi)) return x;
        x = xn;
    }
    return x;
}

/// Golden-section maximization on [a, b]; returns argmax.
inline double golden_max(const Fn& f, double a, double b, double xtol,
                         int max_iter = 300) {
    const double phi = 0.6180339887498949;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

/// Result of resolving one level-crossing pair inside an interval that is
/// known to contain a single interior maximum of f.
struct PeakPair {
    double peak_x = 0;
    double peak_value = 0;
    bool is_double = false;   // peak within double_tol of the level
    bool below = false;       // peak below level - double_tol (no roots)
    double left_root = 0, right_root = 0;
};

/// Scans [a, b], locates the interior maximum of f, and if the maximum
/// clears `level`, brackets and refines the two crossings. f must be below
/// `level` at both ends. A peak that fails to clear the level by more than
/// `below_tol` reports failure; crossings closer than `collapse_len` are
/// collapsed to one double root (the function value at a near-closed pair
/// scales with the squared separation, so value thresholds alone would
/// swallow genuinely open narrow pairs).
inline PeakPair level_crossing_pair(const Fn& f, double a, double b,
                                    double level, double below_tol,
                                    double collapse_len, double xtol,
                                    int nscan = 96) {
    PeakPair out;
    if (b - a <= xtol) {  // degenerate interval: report the endpoint value
        out.peak_x = a;
        out.peak_value = f(a);
        out.is_double = std::abs(out.peak_value - level) <= below_tol;
        out.below = out.peak_value < level - below_tol;
        out.left_root = out.right_root = a;
        return out;
    }
    int best = -1;
    double fbest = -1e300;
    std::vector<double> xs(nscan + 1), fs(nscan + 1);
    for (int i = 0; i <= nscan; ++i) {
        xs[i] = a + (b - a) * i / nscan;
        fs[i] = f(xs[i]);
        if (fs[i] > fbest) {
            fbest = fs[i];
            best = i;
        }
    }
    double la = xs[std::max(0, best - 1)];
    double lb = xs[std::min(nscan, best + 1)];
    out.peak_x = golden_max(f, la, lb, xtol);
    out.peak_value = f(out.peak_x);
    if (out.peak_value < fbest) {  // keep the better of scan and refine
        out.peak_x = xs[best];
        out.peak_value = fbest;
    }
    if (out.peak_value < level - below_tol) {
        out.below = true;
        return out;
    }
    // indistinguishable from a tangency at working precision; the argmax
    // sits on a noise plateau of width ~sqrt(eps/curvature), so relocate
    // the vertex from a wide-spaced quadratic fit. The spacing grows like
    // sqrt(x): wider and the cubic term biases the vertex by ~d^2/x,
    // narrower and the curvature drowns in roundoff.
    if (out.peak_value - level <= 1e-12 * (1.0 + std::abs(level))) {
        double d = 6e-5 * std::pow(1.0 + std::abs(out.peak_x), 2.0 / 3.0) +
                   16.0 * xtol;
        double x0 = std::clamp(out.peak_x, a + d, b - d);
        if (x0 - d >= a && x0 + d <= b) {
            double fm = f(x0 - d), fc = f(x0), fp = f(x0 + d);
            double denom = fm - 2.0 * fc + fp;
            if (denom < 0) {
                double shift = 0.5 * d * (fm - fp) / denom;
                if (std::abs(shift) < d) out.peak_x = x0 + shift;
            }
        }
        out.is_double = true;
        out.left_root = out.right_root = out.peak_x;
        return out;
    }
    // two simple crossings; the brackets walk outward from the refined
    // peak (the argmax sample itself can sit below the level when the
    // peak is narrower than the scan step)
    double gl = a, fgl = fs[0] - level;
    for (int i = nscan; i >= 0; --i)
        if (xs[i] <= out.peak_x && fs[i] - level < 0) {
            gl = xs[i];
            fgl = fs[i] - level;
            break;
        }
    double gr = b, fgr = fs[nscan] - level;
    for (int i = 0; i <= nscan; ++i)
        if (xs[i] >= out.peak_x && fs[i] - level < 0) {
            gr = xs[i];
            fgr = fs[i] - level;
            break;
        }
    auto g = [&](double x) { return f(x) - level; };
    out.left_root =
        brent_root(g, gl, out.peak_x, fgl, out.peak_value - level, xtol);
    out.right_root =
        brent_root(g, out.peak_x, gr, out.peak_value - level, fgr, xtol);
    if (out.right_root - out.left_root <= collapse_len) {
        out.is_double = true;
        double mid = 0.5 * (out.left_root + out.right_root);
        out.left_root = out.right_root = mid;
    }
    return out;
}

}  // namespace slspec::detail

#endif
