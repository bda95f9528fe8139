#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slspec/ode.hpp"
#include "testutil.hpp"

using namespace slspec;
using namespace testutil;

TEST_CASE("free potential endpoints match the closed forms") {
    Potential q = q_zero();
    // lambda = 1: C = cos x, S = sin x
    EndpointData e = integrate_fundamental(q, 1.0);
    CHECK(e.C_pi == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(e.Cprime_pi) < 1e-11);
    CHECK(std::abs(e.S_pi) < 1e-12);
    CHECK(e.Sprime_pi == doctest::Approx(-1.0).epsilon(1e-12));
    // lambda = 4: one full period
    e = integrate_fundamental(q, 4.0);
    CHECK(e.C_pi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.Cprime_pi) < 1e-10);
    CHECK(std::abs(e.S_pi) < 1e-12);
    CHECK(e.Sprime_pi == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant shift leaves endpoints invariant") {
    Potential q0 = q_zero();
    Potential q1 = q_const(1.0);
    EndpointData a = integrate_fundamental(q0, 1.0);
    EndpointData b = integrate_fundamental(q1, 2.0);
    CHECK(b.C_pi == doctest::Approx(a.C_pi).epsilon(1e-11));
    CHECK(b.Sprime_pi == doctest::Approx(a.Sprime_pi).epsilon(1e-11));
    CHECK(std::abs(b.S_pi - a.S_pi) < 1e-11);
    CHECK(std::abs(b.Cprime_pi - a.Cprime_pi) < 1e-11);
}

TEST_CASE("shift covariance across potentials and offsets") {
    Potential base = q_two_cos();
    for (double c : {-1.0, 1.0, 5.0}) {
        Potential shifted = Potential::from_function(
            [c](double x) { return 2.0 * std::cos(2.0 * x) + c; }, 1024);
        for (double lam : {0.3, 7.7, 30.0}) {
            EndpointData a = integrate_fundamental(base, lam);
            EndpointData b = integrate_fundamental(shifted, lam + c);
            CHECK(std::abs(a.C_pi - b.C_pi) <= 1e-9 * (1 + std::abs(a.C_pi)));
            CHECK(std::abs(a.S_pi - b.S_pi) <= 1e-9 * (1 + std::abs(a.S_pi)));
            CHECK(std::abs(a.Cprime_pi - b.Cprime_pi) <=
                  1e-9 * (1 + std::abs(a.Cprime_pi)));
            CHECK(std::abs(a.Sprime_pi - b.Sprime_pi) <=
                  1e-9 * (1 + std::abs(a.Sprime_pi)));
        }
    }
}

TEST_CASE("oscillatory endpoint values agree with the fine-step oracle") {
    // the extrapolated pair of library runs removes the cell-average error,
    // so the comparison is against the smooth potential itself
    auto qf = [](double x) { return 2.0 * std::cos(2.0 * x); };
    OracleEndpoint ref = rk4_endpoint_richardson(qf, 1.0, 3000);
    Potential qa = Potential::from_function(qf, 4096);
    Potential qb = Potential::from_function(qf, 8192);
    EndpointData ea = integrate_fundamental(qa, 1.0);
    EndpointData eb = integrate_fundamental(qb, 1.0);
    auto extrap = [](double fine, double coarse) {
        return (4.0 * fine - coarse) / 3.0;
    };
    CHECK(std::abs(extrap(eb.C_pi, ea.C_pi) - ref.C) < 1e-8);
    CHECK(std::abs(extrap(eb.Cprime_pi, ea.Cprime_pi) - ref.Cp) < 1e-8);
    CHECK(std::abs(extrap(eb.S_pi, ea.S_pi) - ref.S) < 1e-8);
    CHECK(std::abs(extrap(eb.Sprime_pi, ea.Sprime_pi) - ref.Sp) < 1e-8);
}

TEST_CASE("wronskian and trace identity hold on a lambda grid") {
    std::vector<Potential> witnesses;
    witnesses.push_back(q_zero());
    witnesses.push_back(q_const(3.0));
    witnesses.push_back(q_two_cos());
    witnesses.push_back(q_tent());
    witnesses.push_back(q_linear());
    for (const Potential& q : witnesses) {
        // the grid reaches 4 units below min q: the same hyperbolic depth
        // for every witness, clear of the double-precision det floor
        double lo = std::max(-5.0, q.min_cell() - 4.0);
        for (double lam : linspace(lo, 1600.0, 100)) {
            EndpointData e = integrate_fundamental(q, lam);
            CHECK(e.wronskian_residual() <= tol::wronskian);
            CHECK(e.trace_identity_residual() <= tol::trace_identity);
        }
    }
}

TEST_CASE("wronskian residual operation") {
    CHECK(wronskian_residual(q_zero(), 1.0) <= 1e-12);
    CHECK(wronskian_residual(q_two_cos(), 50.0) <= tol::wronskian);
    // bounded irregular samples, hyperbolic regime
    std::vector<double> v(1025);
    for (size_t i = 0; i < v.size(); ++i)
        v[i] = std::sin(7.0 * double(i)) * 1.7;  // deterministic jitter
    Potential qr(std::move(v));
    CHECK(wronskian_residual(qr, -5.0) <= tol::wronskian);
}

TEST_CASE("sampled solutions satisfy their boundary normalizations") {
    Potential q = q_two_cos();
    SolutionSample c = eval_solution(q, 3.7, SolutionKind::C);
    CHECK(c.y.front() == 1.0);
    CHECK(c.yprime.front() == 0.0);
    SolutionSample s = eval_solution(q, 3.7, SolutionKind::S);
    CHECK(s.y.front() == 0.0);
    CHECK(s.yprime.front() == 1.0);
    SolutionSample p = eval_solution(q, 3.7, SolutionKind::psi);
    CHECK(p.y.back() == 0.0);
    CHECK(p.yprime.back() == -1.0);
    SolutionSample t = eval_solution(q, 3.7, SolutionKind::theta, 0.5);
    CHECK(t.y.front() == 1.0);
    CHECK(t.yprime.front() == 0.5);
}

TEST_CASE("free-potential psi and theta closed forms") {
    Potential q = q_zero();
    SolutionSample p = eval_solution(q, 1.0, SolutionKind::psi);
    SolutionSample t = eval_solution(q, 1.0, SolutionKind::theta, 0.0);
    for (int i = 0; i <= q.segments(); i += 64) {
        double x = q.node(i);
        CHECK(std::abs(p.y[i] - std::sin(kPi - x)) < 1e-11);
        CHECK(std::abs(t.y[i] - std::cos(x)) < 1e-11);
    }
}

TEST_CASE("symmetric potential: delta vanishes and psi mirrors S") {
    Potential q = q_two_cos();
    REQUIRE(q.symmetric());
    for (double lam : linspace(-2.0, 900.0, 40)) {
        EndpointData e = integrate_fundamental(q, lam);
        CHECK(std::abs(e.delta()) <= 1e-7 * (1.0 + std::abs(lam)));
    }
    // lambda near the first Dirichlet eigenvalue of 2 cos 2x
    double lam = -0.11;
    SolutionSample psi = eval_solution(q, lam, SolutionKind::psi);
    SolutionSample s = eval_solution(q, lam, SolutionKind::S);
    const int M = q.segments();
    for (int i = 0; i <= M; i += 32)
        CHECK(std::abs(psi.y[i] - s.y[M - i]) < 1e-7);
}

TEST_CASE("endpoints vary continuously in lambda") {
    Potential q = q_two_cos();
    for (double lam : linspace(0.5, 800.0, 25)) {
        EndpointData a = integrate_fundamental(q, lam);
        EndpointData b = integrate_fundamental(q, lam + 1e-6);
        double scale = std::abs(a.C_pi) + std::abs(a.S_pi) +
                       std::abs(a.Cprime_pi) + std::abs(a.Sprime_pi) + 1.0;
        double change = std::abs(a.C_pi - b.C_pi) + std::abs(a.S_pi - b.S_pi) +
                        std::abs(a.Cprime_pi - b.Cprime_pi) +
                        std::abs(a.Sprime_pi - b.Sprime_pi);
        CHECK(change / scale <= 1e-4);
    }
}

TEST_CASE("jet derivatives match finite differences") {
    Potential q = q_two_cos();
    for (double lam : {0.7, 12.3, 150.0}) {
        EndpointJet j = integrate_fundamental_jet(q, lam);
        double dl = 1e-6 * (1.0 + std::abs(lam));
        EndpointData lo = integrate_fundamental(q, lam - dl);
        EndpointData hi = integrate_fundamental(q, lam + dl);
        CHECK(j.dS_pi == doctest::Approx((hi.S_pi - lo.S_pi) / (2 * dl)).epsilon(1e-5));
        CHECK(j.dC_pi == doctest::Approx((hi.C_pi - lo.C_pi) / (2 * dl)).epsilon(1e-5));
        CHECK(j.dSprime_pi ==
              doctest::Approx((hi.Sprime_pi - lo.Sprime_pi) / (2 * dl)).epsilon(1e-5));
        CHECK(j.dCprime_pi ==
              doctest::Approx((hi.Cprime_pi - lo.Cprime_pi) / (2 * dl)).epsilon(1e-5));
    }
}

TEST_CASE("batch evaluation: serial and parallel agree bit for bit") {
    Potential q = q_two_cos();
    std::vector<double> lams = linspace(-3.0, 400.0, 64);
    auto a = endpoint_batch(q, lams, Exec::serial);
    auto b = endpoint_batch(q, lams, Exec::parallel);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].C_pi == b[i].C_pi);
        CHECK(a[i].S_pi == b[i].S_pi);
        CHECK(a[i].Cprime_pi == b[i].Cprime_pi);
        CHECK(a[i].Sprime_pi == b[i].Sprime_pi);
    }
}

TEST_CASE("potential invariants") {
    CHECK_THROWS_AS(Potential(std::vector<double>(5, 0.0)), std::invalid_argument);
    std::vector<double> bad(65, 0.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(Potential(std::move(bad)), std::invalid_argument);
    std::vector<double> notsym(65, 0.0);
    notsym[1] = 1.0;
    CHECK_THROWS_AS(Potential(std::move(notsym), true), std::invalid_argument);
    Potential q = q_two_cos();
    double trap = 0;
    for (int i = 0; i < q.nodes(); ++i) {
        double w = (i == 0 || i == q.segments()) ? 0.5 : 1.0;
        trap += w * q.values()[i];
    }
    trap *= q.step() / kPi;
    CHECK(std::abs(q.mean() - trap) <= 1e-12 * (1.0 + std::abs(trap)));
}
