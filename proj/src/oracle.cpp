#include "slspec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "exec_util.hpp"

namespace slspec {

namespace {

// Symmetric matrix that is tridiagonal plus one (first, last) corner
// entry. Covers all four discretizations: the Dirichlet one simply has
// corner = 0.
struct CyclicTridiag {
    std::vector<double> diag;
    std::vector<double> off;  // off[i] couples i and i+1
    double corner = 0;        // couples 0 and dim-1

    int dim() const { return int(diag.size()); }

    // Number of eigenvalues below sigma, by the inertia of the LDL^T
    // factorization (Sylvester). The last row/column is carried as a
    // border so the elimination stays O(dim).
    int count_below(double sigma) const {
        const int n = dim();
        int neg = 0;
        if (n == 1) return (diag[0] - sigma < 0) ? 1 : 0;
        double p = diag[0] - sigma;         // current pivot
        double f = corner;                  // coupling of last row to current col
        double last = diag[n - 1] - sigma;  // running Schur complement of last row
        const double tiny = 1e-300;
        for (int i = 0; i + 1 < n - 1; ++i) {
            if (p == 0) p = tiny;
            if (p < 0) ++neg;
            double e = off[i];
            double pn = diag[i + 1] - sigma - e * e / p;
            double fn = ((i + 1 == n - 2) ? off[n - 2] : 0.0) - e * f / p;
            last -= f * f / p;
            p = pn;
            f = fn;
        }
        if (p == 0) p = tiny;
        if (p < 0) ++neg;
        last -= f * f / p;
        if (last < 0) ++neg;
        return neg;
    }
};

CyclicTridiag assemble(const Potential& q, BoundaryCondition bc, int M,
                       double a, double b) {
    const double h = kPi / M;
    const double ih2 = 1.0 / (h * h);
    CyclicTridiag A;
    switch (bc) {
        case BoundaryCondition::dirichlet: {
            A.diag.resize(M - 1);
            A.off.assign(M - 2, -ih2);
            for (int i = 1; i < M; ++i)
                A.diag[i - 1] = 2.0 * ih2 + q.value_at(i * h);
            break;
        }
        case BoundaryCondition::periodic:
        case BoundaryCondition::antiperiodic_like: {
            A.diag.resize(M);
            A.off.assign(M - 1, -ih2);
            for (int i = 0; i < M; ++i)
                A.diag[i] = 2.0 * ih2 + q.value_at(i * h);
            A.corner = (bc == BoundaryCondition::periodic) ? -ih2 : ih2;
            break;
        }
        case BoundaryCondition::bvpb: {
            // ghost-node elimination of y'(0) = a y(0) - b y(pi) and
            // y'(pi) = -a y(pi) + b y(0); the boundary rows carry weight
            // 1/2, removed by a diagonal congruence that preserves inertia
            A.diag.resize(M + 1);
            A.off.assign(M, -ih2);
            for (int i = 1; i < M; ++i)
                A.diag[i] = 2.0 * ih2 + q.value_at(i * h);
            A.diag[0] = 2.0 * ih2 + 2.0 * a / h + q.value_at(0.0);
            A.diag[M] = 2.0 * ih2 + 2.0 * a / h + q.value_at(kPi);
            const double s2 = std::sqrt(2.0);
            A.off[0] = -s2 * ih2;
            A.off[M - 1] = -s2 * ih2;
            A.corner = -2.0 * b / h;
            break;
        }
    }
    return A;
}

std::vector<double> lowest_eigenvalues(const CyclicTridiag& A, int N,
                                       double lo_hint, Exec exec) {
    // Gershgorin upper bound; lower end from the hint (min q minus slack)
    double hi0 = -1e300;
    for (int i = 0; i < A.dim(); ++i) {
        double r = std::abs(A.corner) * (i == 0 || i == A.dim() - 1);
        if (i > 0) r += std::abs(A.off[i - 1]);
        if (i + 1 < A.dim()) r += std::abs(A.off[i]);
        hi0 = std::max(hi0, A.diag[i] + r);
    }
    double lo0 = lo_hint;
    int guard = 0;
    while (A.count_below(lo0) > 0) {
        lo0 = lo0 - 2.0 * std::pow(2.0, guard);
        if (++guard > 60)
            throw std::runtime_error("matrix_spectrum: cannot bound spectrum below");
    }
    std::vector<double> out(N);
    detail::parallel_for(N, exec, [&](long k) {
        double lo = lo0, hi = hi0;
        // bisect the counting function to isolate eigenvalue #k (0-based);
        // resolved to near machine precision so Richardson differences of
        // the two meshes are not polluted by the search itself
        while (hi - lo > 1e-12 &&
               hi - lo > 1e-14 * (std::abs(lo) + std::abs(hi))) {
            double mid = 0.5 * (lo + hi);
            if (A.count_below(mid) > k) hi = mid;
            else lo = mid;
        }
        out[k] = 0.5 * (lo + hi);
    });
    return out;
}

}  // namespace

std::vector<double> matrix_spectrum(const Potential& q, BoundaryCondition bc,
                                    int M, int N, double a, double b,
                                    Exec exec) {
    if (N < 1) throw std::invalid_argument("matrix_spectrum: N >= 1");
    if (M < 16 * N)
        throw std::invalid_argument("matrix_spectrum: need M >= 16 N");
    if (bc == BoundaryCondition::bvpb && b == 0)
        throw std::invalid_argument("matrix_spectrum: bvpb needs b != 0");

    double lo_hint = q.min_cell() - std::pow(1.0 + std::abs(a) + std::abs(b), 2) - 8.0;
    std::vector<double> coarse, fine;
    try {
        coarse = lowest_eigenvalues(assemble(q, bc, M, a, b), N, lo_hint, exec);
        fine = lowest_eigenvalues(assemble(q, bc, 2 * M, a, b), N, lo_hint, exec);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("matrix_spectrum: eigensolve failed: ") +
                                 e.what());
    }
    // Richardson: the central-difference error is O(h^2) per index
    std::vector<double> out(N);
    for (int k = 0; k < N; ++k) out[k] = (4.0 * fine[k] - coarse[k]) / 3.0;
    return out;
}

}  // namespace slspec
