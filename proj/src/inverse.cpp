#include "slspec/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slspec/ode.hpp"
#include "slspec/products.hpp"
#include "slspec/spectra.hpp"
#include "exec_util.hpp"

namespace slspec {

using detail::ent_sin_over_sqrt;
using detail::parallel_for;

namespace {

// dense LU with partial pivoting, solve in place (systems are small and
// well conditioned: identity plus a quadrature-weighted kernel)
void lu_solve(std::vector<double>& A, std::vector<double>& x, int n) {
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double big = std::abs(A[size_t(k) * n + k]);
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(A[size_t(i) * n + k]);
            if (v > big) {
                big = v;
                piv = i;
            }
        }
        if (big == 0.0)
            throw std::runtime_error("gl solve: singular system (weights not "
                                     "positive or data inconsistent)");
        if (piv != k) {
            for (int j = 0; j < n; ++j)
                std::swap(A[size_t(piv) * n + j], A[size_t(k) * n + j]);
            std::swap(x[piv], x[k]);
        }
        double inv = 1.0 / A[size_t(k) * n + k];
        for (int i = k + 1; i < n; ++i) {
            double m = A[size_t(i) * n + k] * inv;
            if (m == 0.0) continue;
            A[size_t(i) * n + k] = m;
            for (int j = k + 1; j < n; ++j)
                A[size_t(i) * n + j] -= m * A[size_t(k) * n + j];
            x[i] -= m * x[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= A[size_t(i) * n + j] * x[j];
        x[i] = s / A[size_t(i) * n + i];
    }
}

void check_spectral_data(std::span<const double> gamma,
                         std::span<const double> alpha) {
    const int N = int(gamma.size());
    if (int(alpha.size()) != N)
        throw std::invalid_argument("spectral data: gamma/alpha length mismatch");
    if (N < 16)
        throw std::invalid_argument("spectral data: need at least 16 pairs");
    for (int i = 0; i + 1 < N; ++i)
        if (!(gamma[i] < gamma[i + 1]))
            throw characterization_error("dirichlet-ordering",
                                         "gamma not strictly increasing at n = " +
                                             std::to_string(i + 1));
    for (int i = 0; i < N; ++i)
        if (!(alpha[i] > 0))
            throw characterization_error("weight-positivity",
                                         "alpha_n <= 0 at n = " + std::to_string(i + 1));
    if (asymptotic_fit(gamma, AsymptoticModel::dirichlet).diverging)
        throw characterization_error("asymptotics",
                                     "gamma remainders diverge from n^2 + alpha");
    if (asymptotic_fit(alpha, AsymptoticModel::weights).diverging)
        throw characterization_error("asymptotics",
                                     "alpha remainders diverge from pi/(2 n^2)");
}

}  // namespace

GLWorkspace gl_reconstruct(std::span<const double> gamma,
                           std::span<const double> alpha, int M, Exec exec) {
    check_spectral_data(gamma, alpha);
    if (M < 8) throw std::invalid_argument("gl_reconstruct: M >= 8");
    const int N = int(gamma.size());
    const int n1 = M + 1;
    const double h = kPi / M;

    GLWorkspace ws;
    ws.M = M;
    ws.F.assign(size_t(n1) * n1, 0.0);
    ws.K_diag.assign(n1, 0.0);
    ws.row_residual.assign(n1, 0.0);

    // kernel difference against the zero-potential reference; the n-th
    // term cancels identically when gamma_n = n^2, alpha_n = pi/(2 n^2)
    {
        std::vector<double> u(size_t(N) * n1), v(size_t(N) * n1);
        parallel_for(N, exec, [&](long n) {
            for (int i = 0; i < n1; ++i) {
                double x = h * i;
                u[size_t(n) * n1 + i] = ent_sin_over_sqrt(gamma[n], x);
                v[size_t(n) * n1 + i] = std::sin((double(n) + 1) * x);
            }
        });
        parallel_for(n1, exec, [&](long i) {
            for (int j = 0; j <= int(i); ++j) {
                double s = 0;
                for (int n = 0; n < N; ++n) {
                    double t1 = u[size_t(n) * n1 + i] * u[size_t(n) * n1 + j] / alpha[n];
                    double t2 = (2.0 / kPi) * v[size_t(n) * n1 + i] * v[size_t(n) * n1 + j];
                    s += t1 - t2;
                }
                ws.F[i * size_t(n1) + j] = s;
            }
        });
        for (int i = 0; i < n1; ++i)  // mirror the lower triangle
            for (int j = i + 1; j < n1; ++j)
                ws.F[size_t(i) * n1 + j] = ws.F[size_t(j) * n1 + i];
    }

    // per-row dense solves of the second-kind equation on [0, x_i]
    parallel_for(n1 - 1, exec, [&](long row) {
        const int i = int(row) + 1;
        const int n = i + 1;  // nodes 0..i
        std::vector<double> A(size_t(n) * n), rhs(n);
        for (int j = 0; j < n; ++j) {
            for (int s = 0; s < n; ++s) {
                double w = (s == 0 || s == i) ? 0.5 * h : h;
                A[size_t(j) * n + s] =
                    ((j == s) ? 1.0 : 0.0) + w * ws.F_at(s, j);
            }
            rhs[j] = -ws.F_at(i, j);
        }
        std::vector<double> Asaved = A, rhs_saved = rhs;
        lu_solve(A, rhs, n);  // rhs now holds the kernel row K(x_i, .)
        double res = 0, kmax = 0;
        for (int j = 0; j < n; ++j) kmax = std::max(kmax, std::abs(rhs[j]));
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (int t = 0; t < n; ++t) s += Asaved[size_t(j) * n + t] * rhs[t];
            res = std::max(res, std::abs(s - rhs_saved[j]));
        }
        ws.row_residual[i] = res;
        if (res > tol::gl_row_residual * (1.0 + kmax))
            throw std::runtime_error("gl solve: residual " + std::to_string(res) +
                                     " too large at row " + std::to_string(i));
        ws.K_diag[i] = rhs[i];
    });
    ws.K_diag[0] = 0.0;
    return ws;
}

Potential solve_ip1(std::span<const double> gamma,
                    std::span<const double> alpha, int M, Exec exec) {
    GLWorkspace ws = gl_reconstruct(gamma, alpha, M, exec);
    const double h = kPi / M;
    std::vector<double> q(M + 1);
    const auto& K = ws.K_diag;
    q[0] = 2.0 * (-3.0 * K[0] + 4.0 * K[1] - K[2]) / (2.0 * h);
    q[M] = 2.0 * (3.0 * K[M] - 4.0 * K[M - 1] + K[M - 2]) / (2.0 * h);
    for (int i = 1; i < M; ++i) q[i] = 2.0 * (K[i + 1] - K[i - 1]) / (2.0 * h);
    return Potential(std::move(q));
}

Potential solve_ip3(std::span<const double> gamma, int M, Exec exec) {
    ProductEvaluator d = ProductEvaluator::dirichlet(
        std::vector<double>(gamma.begin(), gamma.end()));
    const int N = int(gamma.size());
    std::vector<double> alpha(N);
    for (int i = 0; i < N; ++i) {
        int n = i + 1;
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        alpha[i] = sign * d.derivative_at_zero(n);
        if (!(alpha[i] > 0))
            throw characterization_error(
                "weight-positivity",
                "(-1)^n d_dot(gamma_n) <= 0 at n = " + std::to_string(n) +
                    ": gamma is not a symmetric Dirichlet spectrum");
    }
    return symmetrized(solve_ip1(gamma, alpha, M, exec));
}

Potential solve_ip2(std::span<const double> lambda,
                    std::span<const double> gamma, std::span<const int> omega,
                    int M, Exec exec) {
    if (gamma.size() != omega.size())
        throw std::invalid_argument("solve_ip2: gamma/omega length mismatch");
    ProductEvaluator p = ProductEvaluator::periodic(
        std::vector<double>(lambda.begin(), lambda.end()));
    for (const auto& rec : check_band_realizability(p))
        if (!rec.pass)
            throw characterization_error(
                "band-max", "max of p below 2 on interval " +
                                std::to_string(rec.n) + " (margin " +
                                std::to_string(rec.margin) + ")");
    ProductEvaluator d = ProductEvaluator::dirichlet(
        std::vector<double>(gamma.begin(), gamma.end()));
    const int N = int(gamma.size());
    std::vector<double> alpha(N);
    for (int i = 0; i < N; ++i) {
        const int n = i + 1;
        if (omega[i] < -1 || omega[i] > 1)
            throw characterization_error("omega-membership",
                                         "omega_n outside {-1,0,1} at n = " +
                                             std::to_string(n));
        double Delta = 1.0 - p.eval(gamma[i]);
        double disc = Delta * Delta - 1.0;
        if (omega[i] != 0 && disc < -tol::dead_zone(n))
            throw characterization_error(
                "gamma-in-gap", "Delta^2 < 1 at gamma_" + std::to_string(n) +
                                    " with nonzero omega: gamma not inside "
                                    "its gap");
        double root = std::sqrt(std::max(0.0, disc));
        alpha[i] = d.derivative_at_zero(n) * (Delta - omega[i] * root);
        if (!(alpha[i] > 0))
            throw characterization_error("weight-positivity",
                                         "derived alpha_n <= 0 at n = " +
                                             std::to_string(n));
    }
    return solve_ip1(gamma, alpha, M, exec);
}

Potential solve_ip4(std::span<const double> lambda, std::span<const int> eps,
                    int M, Exec exec) {
    ProductEvaluator p = ProductEvaluator::periodic(
        std::vector<double>(lambda.begin(), lambda.end()));
    for (const auto& rec : check_band_realizability(p))
        if (!rec.pass)
            throw characterization_error(
                "band-max", "max of p below 2 on interval " +
                                std::to_string(rec.n) + " (margin " +
                                std::to_string(rec.margin) + ")");

    const int pairs = (int(lambda.size()) - 1) / 2;
    // only the lower half of the retained range is probed, so the tail
    // model stays accurate at every placed gamma
    const int Nuse = std::min(pairs, int(eps.size()));
    if (Nuse < 16)
        throw std::invalid_argument("solve_ip4: need at least 16 usable gaps");

    std::vector<double> plus = plus_edges_from_p(p, (Nuse + 1) / 2);
    std::vector<Gap> gap_list = gaps(lambda, plus);
    if (int(gap_list.size()) < Nuse)
        throw std::invalid_argument("solve_ip4: not enough resolved gaps");

    std::vector<double> gam(Nuse);
    for (int i = 0; i < Nuse; ++i) {
        const int n = i + 1;
        const Gap& a = gap_list[i];
        const bool recovered = (n % 2 == 1);  // odd gaps come from the p product
        if (eps[i] < -1 || eps[i] > 1)
            throw characterization_error("E-membership",
                                         "eps_n outside {-1,0,1} at n = " +
                                             std::to_string(n));
        if (a.cls == GapClass::closed) {
            // a nonzero sign on an even gap contradicts the given edge pair;
            // on a recovered gap it can mean a genuine opening narrower than
            // the product's resolution, so the collapsed point is the best
            // placement either way
            if (eps[i] != 0 && !recovered)
                throw characterization_error(
                    "E-membership", "eps_n nonzero on the closed gap a_" +
                                        std::to_string(n));
            gam[i] = a.midpoint();
        } else {
            if (eps[i] == 0)
                throw characterization_error(
                    "E-membership", "eps_n zero on the open gap a_" +
                                        std::to_string(n));
            gam[i] = (eps[i] > 0) ? a.right : a.left;
        }
    }

    ProductEvaluator d = ProductEvaluator::dirichlet(gam);
    std::vector<double> alpha(Nuse);
    for (int i = 0; i < Nuse; ++i) {
        const int n = i + 1;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        double ddot = d.derivative_at_zero(n);
        double Delta = 1.0 - p.eval(gam[i]);
        if (ddot * sign <= 0)
            throw characterization_error("ddot-sign",
                                         "sign d_dot(gamma_n) != (-1)^n at n = " +
                                             std::to_string(n));
        if (Delta * sign <= 0)
            throw characterization_error("discriminant-sign",
                                         "sign Delta(gamma_n) != (-1)^n at n = " +
                                             std::to_string(n));
        // at a gap endpoint |Delta| = 1, so both weight formulas coincide
        if (std::abs(Delta - sign) > tol::dead_zone(n))
            throw characterization_error(
                "endpoint-consistency",
                "|Delta(gamma_n)| deviates from 1 at n = " + std::to_string(n));
        alpha[i] = ddot * Delta;
        if (!(alpha[i] > 0))
            throw characterization_error("weight-positivity",
                                         "derived alpha_n <= 0 at n = " +
                                             std::to_string(n));
    }
    return symmetrized(solve_ip1(gam, alpha, M, exec));
}

Potential symmetrized(const Potential& q) {
    std::vector<double> v = q.values();
    const int n = int(v.size());
    for (int i = 0; i < n; ++i) {
        double m = 0.5 * (q.values()[i] + q.values()[n - 1 - i]);
        v[i] = m;
    }
    return Potential(std::move(v), true);
}

double l2_distance(const Potential& A, const Potential& B) {
    const Potential& fine = (A.segments() >= B.segments()) ? A : B;
    const Potential& other = (A.segments() >= B.segments()) ? B : A;
    const int M = fine.segments();
    const double h = fine.step();
    double s = 0;
    for (int i = 0; i <= M; ++i) {
        double d = fine.values()[i] - other.value_at(fine.node(i));
        double w = (i == 0 || i == M) ? 0.5 : 1.0;
        s += w * d * d;
    }
    return std::sqrt(s * h);
}

}  // namespace slspec
