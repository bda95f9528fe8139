#include "slspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slspec/ode.hpp"
#include "exec_util.hpp"
#include "rootfind.hpp"

namespace slspec {

using detail::brent_root;
using detail::level_crossing_pair;
using detail::newton_polish;
using detail::parallel_for;
using detail::shoot_count;

// ------------------------------------------------------- type invariants

void DirichletSpectralData::validate() const {
    const int N = int(gamma.size());
    if (int(alpha.size()) != N || int(beta.size()) != N || int(ddot.size()) != N)
        throw std::invalid_argument("DirichletSpectralData: ragged arrays");
    for (int i = 0; i + 1 < N; ++i)
        if (!(gamma[i] < gamma[i + 1]))
            throw characterization_error("dirichlet-ordering",
                                         "gamma not strictly increasing at n = " +
                                             std::to_string(i + 1));
    for (int i = 0; i < N; ++i) {
        int n = i + 1;
        if (!(alpha[i] > 0))
            throw characterization_error("weight-positivity",
                                         "alpha_n <= 0 at n = " + std::to_string(n));
        double want = (n % 2 == 0) ? 1.0 : -1.0;
        if (ddot[i] * want <= 0)
            throw characterization_error("ddot-sign",
                                         "sign ddot(gamma_n) != (-1)^n at n = " +
                                             std::to_string(n));
        if (std::abs(alpha[i] * beta[i] + ddot[i]) >
            tol::weight_crosscheck_rel * std::abs(ddot[i]))
            throw characterization_error("alpha-beta-ddot",
                                         "alpha*beta + ddot residual too large at n = " +
                                             std::to_string(n));
    }
}

void BandSpectrum::validate() const {
    const int L = int(lambda.size());
    const int Lp = int(lambda_plus.size());
    if (L < 3 || L % 2 == 0 || Lp + 1 != L)
        throw std::invalid_argument("BandSpectrum: need lambda_0..lambda_{2N} "
                                    "and lambda_plus_1..lambda_plus_{2N}");
    auto le = [](double a, double b, double slack) { return a <= b + slack; };
    // lambda_0 < lambda_1 <= lambda_2 < lambda_3 <= ...
    for (int i = 0; i + 1 < L; ++i) {
        double slack = tol::gap_closed((i + 2) / 2);
        bool pair_edge = (i % 2 == 1);  // lambda_{2n-1} <= lambda_{2n}
        if (pair_edge ? !le(lambda[i], lambda[i + 1], slack)
                      : !(lambda[i] < lambda[i + 1] + 0))
            throw characterization_error("band-ordering",
                                         "lambda ordering violated at index " +
                                             std::to_string(i));
    }
    for (int i = 0; i + 1 < Lp; i += 2) {
        double slack = tol::gap_closed((i + 2) / 2);
        if (!le(lambda_plus[i], lambda_plus[i + 1], slack))
            throw characterization_error("band-ordering",
                                         "lambda_plus pair ordering violated at index " +
                                             std::to_string(i));
    }
    // interlacing: lambda_0 < l+_1, l+_2 < lambda_1, lambda_2 < l+_3, ...
    for (int n = 1; n + 1 < L; n += 2) {
        if (!(lambda[n - 1] < lambda_plus[n - 1] + tol::gap_closed(n)))
            throw characterization_error("interlacing",
                                         "lambda/lambda_plus interlacing violated near n = " +
                                             std::to_string(n));
        if (!(lambda_plus[n] < lambda[n] + tol::gap_closed(n)))
            throw characterization_error("interlacing",
                                         "lambda_plus/lambda interlacing violated near n = " +
                                             std::to_string(n));
    }
}

void BvpBSpectrum::validate() const {
    if (b == 0) throw std::invalid_argument("BvpBSpectrum: b must be nonzero");
    for (size_t i = 0; i + 2 < mu.size(); ++i)
        if (!(mu[i] < mu[i + 2]))
            throw characterization_error("bvpb-ordering",
                                         "mu_n < mu_{n+2} violated at n = " +
                                             std::to_string(i));
}

// ------------------------------------------------------ Dirichlet spectrum

namespace {

// number of interior sign changes of S(., lambda), i.e. #{gamma_k < lambda}
int dirichlet_count(const Potential& q, double lambda) {
    return shoot_count(q, lambda, 0.0, 1.0).sign_changes;
}

double endpoint_d(const Potential& q, double lambda) {
    return integrate_fundamental(q, lambda).S_pi;
}

}  // namespace

std::vector<double> dirichlet_spectrum(const Potential& q, int N, Exec exec) {
    if (N < 1) throw std::invalid_argument("dirichlet_spectrum: N >= 1");
    std::vector<double> out(N);
    const double lo0 = q.min_cell();
    parallel_for(N, exec, [&](long idx) {
        const int n = int(idx) + 1;
        double a = lo0, b = double(n) * n + q.max_cell() + 1.0;
        int cb = dirichlet_count(q, b);
        int guard = 0;
        while (cb < n) {  // safety net; the variational bound makes this rare
            b = lo0 + 1.5 * (b - lo0) + 1.0;
            cb = dirichlet_count(q, b);
            if (++guard > 60)
                throw std::runtime_error("dirichlet_spectrum: missed eigenvalue " +
                                         std::to_string(n));
        }
        int ca = dirichlet_count(q, a);
        if (ca > n - 1)
            throw std::runtime_error("dirichlet_spectrum: lower bound not below "
                                     "eigenvalue " + std::to_string(n));
        // shrink to an isolating bracket: count(a) = n-1, count(b) = n
        guard = 0;
        while (ca < n - 1 || cb > n) {
            double mid = 0.5 * (a + b);
            int cm = dirichlet_count(q, mid);
            if (cm >= n) { b = mid; cb = cm; }
            else { a = mid; ca = cm; }
            if (++guard > 400)
                throw std::runtime_error("dirichlet_spectrum: bracket failure at " +
                                         std::to_string(n));
        }
        double fa = endpoint_d(q, a), fb = endpoint_d(q, b);
        double xtol = tol::eigen_atol(n);
        double root = brent_root([&](double l) { return endpoint_d(q, l); },
                                 a, b, fa, fb, xtol);
        root = newton_polish(root, a, b,
                             [&](double l) { return endpoint_d(q, l); },
                             [&](double l) {
                                 return integrate_fundamental_jet(q, l).d_dot();
                             });
        out[idx] = root;
    });
    return out;
}

// ------------------------------------------------------- periodic spectrum

namespace {

double discriminant(const Potential& q, double lambda) {
    return integrate_fundamental(q, lambda).Delta();
}

// first periodic eigenvalue: zero of Delta - 1 below gamma_1
double lowest_band_edge(const Potential& q, double gamma1) {
    double lo = q.min_cell() - 1.0;
    int guard = 0;
    while (discriminant(q, lo) <= 1.0 + 1e-12) {
        lo -= 2.0 * (guard + 1);
        if (++guard > 40)
            throw std::runtime_error("periodic_spectrum: cannot bracket lambda_0");
    }
    auto f = [&](double l) { return discriminant(q, l) - 1.0; };
    double root = brent_root(f, lo, gamma1, f(lo), f(gamma1), 1e-11 * (1 + std::abs(gamma1)));
    return newton_polish(root, lo, gamma1, f, [&](double l) {
        return integrate_fundamental_jet(q, l).Delta_dot();
    });
}

}  // namespace

BandSpectrum periodic_spectrum(const Potential& q, int N, Exec exec) {
    if (N < 1) throw std::invalid_argument("periodic_spectrum: N >= 1");
    const int G = 2 * N;  // number of gaps resolved
    std::vector<double> gam = dirichlet_spectrum(q, G + 1, exec);

    BandSpectrum band;
    band.lambda.assign(2 * N + 1, 0.0);
    band.lambda_plus.assign(2 * N, 0.0);
    band.lambda[0] = lowest_band_edge(q, gam[0]);

    parallel_for(G, exec, [&](long gi) {
        const int g = int(gi) + 1;
        const double t = (g % 2 == 0) ? 1.0 : -1.0;
        const double A = (g == 1) ? band.lambda[0] : gam[g - 2];
        const double B = gam[g];
        auto f = [&](double l) { return t * discriminant(q, l); };
        auto pp = level_crossing_pair(f, A, B, 1.0, tol::double_root(g),
                                      tol::gap_closed(g),
                                      1e-11 * (1.0 + std::abs(B)));
        double left, right;
        if (pp.below)
            throw std::runtime_error(
                "periodic_spectrum: cannot resolve multiplicity in gap " +
                std::to_string(g));
        if (pp.is_double) {
            left = right = pp.peak_x;
        } else {
            auto fp = [&](double l) {
                return t * integrate_fundamental_jet(q, l).Delta_dot();
            };
            auto f1 = [&](double l) { return f(l) - 1.0; };
            left = newton_polish(pp.left_root, A, pp.peak_x, f1, fp);
            right = newton_polish(pp.right_root, pp.peak_x, B, f1, fp);
        }
        if (g % 2 == 0) {
            band.lambda[g - 1] = left;
            band.lambda[g] = right;
        } else {
            band.lambda_plus[g - 1] = left;
            band.lambda_plus[g] = right;
        }
    });

    band.gaps = gaps(band.lambda, band.lambda_plus);

    // gap side certificates for gamma_n, n = 1..G
    band.omega = omega_sequence(q, std::span(gam).first(G), exec);
    for (int n = 1; n <= G; ++n) {
        Gap& a = band.gaps[n - 1];
        if (a.cls == GapClass::closed) continue;
        double dz = tol::dead_zone(n);
        if (std::abs(gam[n - 1] - a.right) <= dz) a.gamma_side = GammaSide::right;
        else if (std::abs(gam[n - 1] - a.left) <= dz) a.gamma_side = GammaSide::left;
        else a.gamma_side = GammaSide::none;
    }
    if (q.symmetric())
        band.eps = e_sequence(std::span(gam).first(G), band.gaps);
    band.validate();
    return band;
}

std::vector<Gap> gaps(std::span<const double> lambda,
                      std::span<const double> lambda_plus) {
    const int L = int(lambda.size());
    const int Lp = int(lambda_plus.size());
    // odd gaps from lambda_plus pairs, even gaps from lambda pairs
    std::vector<Gap> out;
    for (int n = 1; n <= std::max(Lp, L); ++n) {
        Gap gp;
        if (n % 2 == 1) {
            int k = n;  // lambda_plus indices n-1, n (0-based)
            if (k >= Lp) break;
            gp.left = lambda_plus[k - 1];
            gp.right = lambda_plus[k];
        } else {
            if (n >= L) break;
            gp.left = lambda[n - 1];
            gp.right = lambda[n];
        }
        if (gp.right < gp.left)
            throw characterization_error("band-ordering",
                                         "gap " + std::to_string(n) +
                                             " has negative length");
        gp.cls = (gp.length() <= tol::gap_closed(n)) ? GapClass::closed
                                                     : GapClass::open;
        out.push_back(gp);
    }
    return out;
}

// --------------------------------------------- weights, beta, omega, eps

std::vector<double> weight_numbers(const Potential& q,
                                   std::span<const double> gamma, Exec exec) {
    const int N = int(gamma.size());
    std::vector<double> out(N);
    const double h = q.step();
    parallel_for(N, exec, [&](long i) {
        double g = gamma[i];
        EndpointJet jet = integrate_fundamental_jet(q, g);
        double formula = jet.d_dot() * jet.Sprime_pi;
        SolutionSample s = eval_solution(q, g, SolutionKind::S);
        double quad = 0.5 * (s.y.front() * s.y.front() + s.y.back() * s.y.back());
        for (size_t j = 1; j + 1 < s.y.size(); ++j) quad += s.y[j] * s.y[j];
        quad *= h;
        if (std::abs(quad - formula) > tol::weight_crosscheck_rel * std::abs(formula))
            throw std::runtime_error(
                "weight_numbers: quadrature/derivative cross-check failed at n = " +
                std::to_string(i + 1) + " (inaccurate gamma?)");
        if (!(quad > 0))
            throw characterization_error("weight-positivity",
                                         "alpha_n <= 0 at n = " + std::to_string(i + 1));
        out[i] = quad;
    });
    return out;
}

std::vector<double> beta_sequence(const Potential& q,
                                  std::span<const double> gamma, Exec exec) {
    const int N = int(gamma.size());
    std::vector<double> out(N);
    parallel_for(N, exec, [&](long i) {
        double sp = integrate_fundamental(q, gamma[i]).Sprime_pi;
        if (std::abs(sp) < 1e-6)
            throw std::runtime_error(
                "beta_sequence: S'(pi) vanishes; lambda is not a Dirichlet "
                "eigenvalue at n = " + std::to_string(i + 1));
        out[i] = -1.0 / sp;
    });
    return out;
}

std::vector<int> omega_sequence(const Potential& q,
                                std::span<const double> gamma, Exec exec) {
    const int N = int(gamma.size());
    std::vector<int> out(N);
    parallel_for(N, exec, [&](long i) {
        double dl = integrate_fundamental(q, gamma[i]).delta();
        double dz = tol::dead_zone(int(i) + 1);
        out[i] = (std::abs(dl) <= dz) ? 0 : (dl > 0 ? 1 : -1);
    });
    return out;
}

std::vector<int> e_sequence(std::span<const double> gamma,
                            std::span<const Gap> gap_list) {
    const int N = int(std::min(gamma.size(), gap_list.size()));
    std::vector<int> out(N);
    for (int i = 0; i < N; ++i) {
        const int n = i + 1;
        const Gap& a = gap_list[i];
        const double dz = tol::dead_zone(n);
        if (a.cls == GapClass::closed) {
            if (std::abs(gamma[i] - a.midpoint()) > dz)
                throw characterization_error(
                    "gamma-in-gap", "gamma_" + std::to_string(n) +
                                       " not at the collapsed gap point");
            out[i] = 0;
            continue;
        }
        double dl = std::abs(gamma[i] - a.left);
        double dr = std::abs(gamma[i] - a.right);
        if (std::min(dl, dr) > dz)
            throw characterization_error(
                "gamma-in-gap", "gamma_" + std::to_string(n) +
                                   " interior to an open gap: input potential "
                                   "is not centrally symmetric");
        out[i] = (dr <= dl) ? 1 : -1;
    }
    return out;
}

DirichletSpectralData dirichlet_data(const Potential& q, int N, Exec exec) {
    DirichletSpectralData d;
    d.gamma = dirichlet_spectrum(q, N, exec);
    d.alpha = weight_numbers(q, d.gamma, exec);
    d.beta = beta_sequence(q, d.gamma, exec);
    d.ddot.resize(N);
    parallel_for(N, exec, [&](long i) {
        d.ddot[i] = integrate_fundamental_jet(q, d.gamma[i]).d_dot();
    });
    d.validate();
    return d;
}

// ----------------------------------------------------------------- BVP B

double bvpb_r(const Potential& q, double a, double b, double lambda) {
    EndpointData e = integrate_fundamental(q, lambda);
    return -e.d1() - 2.0 * a * e.Delta() + (b * b - a * a) * e.d() + 2.0 * b;
}

namespace {

double bvpb_r_dot(const Potential& q, double a, double b, double lambda) {
    EndpointJet e = integrate_fundamental_jet(q, lambda);
    return -e.d1_dot() - 2.0 * a * e.Delta_dot() + (b * b - a * a) * e.d_dot();
}

int theta_count(const Potential& q, double a, double lambda) {
    return shoot_count(q, lambda, 1.0, a).sign_changes;
}

double theta_pi(const Potential& q, double a, double lambda) {
    EndpointData e = integrate_fundamental(q, lambda);
    return e.C_pi + a * e.S_pi;
}

}  // namespace

BvpBSpectrum bvpb_spectrum(const Potential& q, double a, double b, int N,
                           Exec exec) {
    if (b == 0) throw std::invalid_argument("bvpb_spectrum: b must be nonzero");
    if (!q.symmetric())
        throw std::invalid_argument("bvpb_spectrum: potential must be "
                                    "centrally symmetric");
    if (N < 1) throw std::invalid_argument("bvpb_spectrum: N >= 1");

    BvpBSpectrum out;
    out.a = a;
    out.b = b;
    out.h = 4.0 * a + kPi * q.mean();

    // ---- mu: scan r for sign changes, with a local-minimum probe for
    //      double (or nearly double) roots.
    auto r = [&](double l) { return bvpb_r(q, a, b, l); };
    const double drift = (std::abs(out.h) + 4.0 * std::abs(b)) / kPi;
    const double lam_max = double(N) * N + drift + 4.0;
    const double lam_lo =
        std::min(q.min_cell(), -drift) - std::pow(1.0 + std::abs(a) + std::abs(b), 2) - 6.0;

    std::vector<double> xs;
    for (double l = lam_lo; l < 1.0; l += 0.05) xs.push_back(l);
    for (double rho = 1.0; rho * rho < lam_max; rho += 1.0 / 64.0)
        xs.push_back(rho * rho);
    xs.push_back(lam_max);

    std::vector<double> fs(xs.size());
    parallel_for(long(xs.size()), exec, [&](long i) { fs[i] = r(xs[i]); });

    std::vector<double> roots;
    // drops re-detections from overlapping scan windows; genuine double
    // roots are pushed twice explicitly by the dip handler
    auto push_root = [&](double x) {
        if (roots.empty() || std::abs(x - roots.back()) > 1e-9 * (1.0 + std::abs(x)))
            roots.push_back(x);
    };
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        bool change = (fs[i] > 0) != (fs[i + 1] > 0);
        if (change) {
            double root = brent_root(r, xs[i], xs[i + 1], fs[i], fs[i + 1],
                                     1e-11 * (1.0 + std::abs(xs[i + 1])));
            root = newton_polish(root, xs[i], xs[i + 1], r, [&](double l) {
                return bvpb_r_dot(q, a, b, l);
            });
            push_root(root);
            continue;
        }
        // same-sign local dip: candidate for a double root
        if (i > 0 && std::abs(fs[i]) < std::abs(fs[i - 1]) &&
            std::abs(fs[i]) <= std::abs(fs[i + 1]) &&
            (fs[i - 1] > 0) == (fs[i] > 0)) {
            double sgn = fs[i] > 0 ? 1.0 : -1.0;
            auto neg = [&](double l) { return -sgn * r(l); };
            double xm = detail::golden_max(neg, xs[i - 1], xs[i + 1],
                                           1e-10 * (1.0 + std::abs(xs[i + 1])));
            double fm = r(xm);
            int n_near = int(std::lround(std::sqrt(std::max(0.0, xm))));
            if (sgn * fm < 0) {
                // actually two simple roots hiding between samples
                push_root(brent_root(r, xs[i - 1], xm, fs[i - 1], fm,
                                     1e-11 * (1.0 + std::abs(xm))));
                push_root(brent_root(r, xm, xs[i + 1], fm, fs[i + 1],
                                     1e-11 * (1.0 + std::abs(xm))));
            } else if (std::abs(fm) <= tol::double_root(n_near)) {
                roots.push_back(xm);
                roots.push_back(xm);
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    if (int(roots.size()) < N)
        throw std::runtime_error("bvpb_spectrum: found " +
                                 std::to_string(roots.size()) + " eigenvalues, "
                                 "expected at least " + std::to_string(N));
    // asymptotic count check over the fully scanned window
    {
        double cut = double(N - 1) * (N - 1) + drift + 2.0;
        int found = 0;
        for (double x : roots) found += (x <= cut);
        int expect = 0;
        for (int n = 0; n < 4 * N + 4; ++n) {
            double pred = double(n) * n +
                          (out.h + ((n % 2 == 0) ? -4.0 * b : 4.0 * b)) / kPi;
            expect += (pred <= cut);
        }
        if (std::abs(found - expect) > 1)
            throw std::runtime_error("bvpb_spectrum: root count " +
                                     std::to_string(found) +
                                     " disagrees with asymptotic prediction " +
                                     std::to_string(expect));
    }
    roots.resize(N);
    out.mu = std::move(roots);

    // ---- nu: zeros of theta(pi, .), isolated by oscillation counting.
    out.nu.resize(N);
    const double nu_lo =
        std::min(0.0, q.min_cell()) - std::pow(1.0 + std::abs(a), 2) - 5.0;
    if (theta_count(q, a, nu_lo) != 0)
        throw std::runtime_error("bvpb_spectrum: Robin lower bound failed");
    parallel_for(N, exec, [&](long idx) {
        const int k = int(idx);  // 0-based index of nu
        double lo = nu_lo;
        double hi = (k + 0.75) * (k + 0.75) + std::max(0.0, q.max_cell()) +
                    std::abs(a) + 5.0;
        int guard = 0;
        while (theta_count(q, a, hi) < k + 1) {
            hi = nu_lo + 1.5 * (hi - nu_lo) + 1.0;
            if (++guard > 60)
                throw std::runtime_error("bvpb_spectrum: missed nu_" +
                                         std::to_string(k));
        }
        int clo = theta_count(q, a, lo), chi = theta_count(q, a, hi);
        guard = 0;
        while (clo < k || chi > k + 1) {
            double mid = 0.5 * (lo + hi);
            int cm = theta_count(q, a, mid);
            if (cm >= k + 1) { hi = mid; chi = cm; }
            else { lo = mid; clo = cm; }
            if (++guard > 400)
                throw std::runtime_error("bvpb_spectrum: nu bracket failure at " +
                                         std::to_string(k));
        }
        auto f = [&](double l) { return theta_pi(q, a, l); };
        double root = brent_root(f, lo, hi, f(lo), f(hi), tol::eigen_atol(k + 1));
        root = newton_polish(root, lo, hi, f, [&](double l) {
            EndpointJet e = integrate_fundamental_jet(q, l);
            return e.dC_pi + a * e.dS_pi;
        });
        out.nu[idx] = root;
    });

    // ---- eta: sign of |theta'(pi, nu_n)| - |b| with a dead zone.
    out.eta.resize(N);
    parallel_for(N, exec, [&](long idx) {
        EndpointData e = integrate_fundamental(q, out.nu[idx]);
        double tp = e.Cprime_pi + a * e.Sprime_pi;
        double v = std::abs(tp) - std::abs(b);
        double dz = tol::dead_zone(int(idx));
        out.eta[idx] = (std::abs(v) <= dz) ? 0 : (v > 0 ? 1 : -1);
    });

    out.validate();
    return out;
}

}  // namespace slspec
