#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slspec/ode.hpp"
#include "slspec/products.hpp"
#include "slspec/spectra.hpp"
#include "testutil.hpp"

using namespace slspec;
using namespace testutil;

namespace {
std::vector<double> squares(int N, double shift = 0.0) {
    std::vector<double> v(N);
    for (int n = 1; n <= N; ++n) v[n - 1] = double(n) * n + shift;
    return v;
}
std::vector<double> free_band_edges(int pairs) {
    std::vector<double> v(2 * pairs + 1);
    v[0] = 0.0;
    for (int n = 1; n <= pairs; ++n)
        v[2 * n - 1] = v[2 * n] = double(2 * n) * (2 * n);
    return v;
}
}  // namespace

TEST_CASE("free-spectrum products reproduce the closed forms") {
    ProductEvaluator d = ProductEvaluator::dirichlet(squares(32));
    CHECK(d.eval(2.25) == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
    CHECK(std::abs(d.eval(1.0)) < 1e-12);
    ProductEvaluator p = ProductEvaluator::periodic(free_band_edges(16));
    CHECK(p.eval(1.0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(p.eval(4.0)) < 1e-10);
}

TEST_CASE("derivative at the zeros of d: free closed forms") {
    ProductEvaluator d = ProductEvaluator::dirichlet(squares(32));
    CHECK(d.derivative_at_zero(1) == doctest::Approx(-kPi / 2).epsilon(1e-10));
    CHECK(d.derivative_at_zero(2) == doctest::Approx(kPi / 8).epsilon(1e-10));
}

TEST_CASE("derivative matches a centered difference of eval") {
    std::vector<double> gam = dirichlet_spectrum(q_two_cos(), 40);
    ProductEvaluator d = ProductEvaluator::dirichlet(gam);
    for (int n : {1, 2, 5, 10, 20}) {
        double g = gam[n - 1];
        double dl = 1e-5 * (1.0 + std::abs(g));
        double fd = (d.eval(g + dl) - d.eval(g - dl)) / (2.0 * dl);
        CHECK(d.derivative_at_zero(n) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("product built on forward Dirichlet data tracks the propagated d") {
    Potential q = q_two_cos();
    std::vector<double> gam = dirichlet_spectrum(q, 200);
    ProductEvaluator d = ProductEvaluator::dirichlet(gam);
    // probes at midpoints between consecutive eigenvalues
    for (int n = 1; n < 50; n += 2) {
        double lam = 0.5 * (gam[n - 1] + gam[n]);
        double ode = integrate_fundamental(q, lam).d();
        CHECK(std::abs(d.eval(lam) - ode) <= 1e-3 * (1.0 + std::abs(ode)));
    }
    double lam = -1.5;  // below the spectrum
    double ode = integrate_fundamental(q, lam).d();
    CHECK(std::abs(d.eval(lam) - ode) <= 1e-3 * (1.0 + std::abs(ode)));
}

TEST_CASE("asymmetric witness: d product stays within the duality budget") {
    Potential q = q_linear();
    std::vector<double> gam = dirichlet_spectrum(q, 200);
    ProductEvaluator d = ProductEvaluator::dirichlet(gam);
    for (int n = 1; n < 40; n += 3) {
        double lam = 0.5 * (gam[n - 1] + gam[n]);
        double ode = integrate_fundamental(q, lam).d();
        CHECK(std::abs(d.eval(lam) - ode) <= 1e-3 * (1.0 + std::abs(ode)));
    }
}

TEST_CASE("p product from forward band edges tracks the propagated p") {
    Potential q = q_two_cos();
    BandSpectrum band = periodic_spectrum(q, 100);
    ProductEvaluator p = ProductEvaluator::periodic(band.lambda);
    for (double lam : linspace(-2.0, 2000.0, 50)) {
        double ode = integrate_fundamental(q, lam).p();
        CHECK(std::abs(p.eval(lam) - ode) <= 1e-3 * (1.0 + std::abs(ode)));
    }
}

TEST_CASE("r product from forward coupled data tracks the propagated r") {
    Potential q = q_two_cos();
    BvpBSpectrum bv = bvpb_spectrum(q, 0.0, 1.0, 200);
    ProductEvaluator r = ProductEvaluator::bvpb(bv.mu, bv.b);
    for (double lam : linspace(-2.0, 2000.0, 50)) {
        double ode = bvpb_r(q, 0.0, 1.0, lam);
        CHECK(std::abs(r.eval(lam) - ode) <= 1e-3 * (1.0 + std::abs(ode)));
    }
}

TEST_CASE("doubling the truncation barely moves the evaluation") {
    Potential q = q_two_cos();
    std::vector<double> gam = dirichlet_spectrum(q, 200);
    std::vector<double> half(gam.begin(), gam.begin() + 100);
    ProductEvaluator dfull = ProductEvaluator::dirichlet(gam);
    ProductEvaluator dhalf = ProductEvaluator::dirichlet(half);
    for (double lam : linspace(-2.0, 600.0, 20)) {
        double a = dhalf.eval(lam), b = dfull.eval(lam);
        CHECK(std::abs(a - b) <= 1e-4 * (1.0 + std::abs(b)));
    }
}

TEST_CASE("band realizability margins") {
    // equality case: every maximum is exactly 2
    ProductEvaluator p0 = ProductEvaluator::periodic(free_band_edges(16));
    for (const auto& rec : check_band_realizability(p0)) {
        CHECK(rec.pass);
        CHECK(std::abs(rec.margin) <= 1e-6);
    }
    // forward data passes
    Potential q = q_two_cos();
    BandSpectrum band = periodic_spectrum(q, 20);
    for (const auto& rec :
         check_band_realizability(ProductEvaluator::periodic(band.lambda)))
        CHECK(rec.pass);
    // tampering with one edge pushes a maximum below 2
    std::vector<double> bad = free_band_edges(16);
    bad[2] = 4.5;  // shift the second zero of the first pair inward
    bool some_fail = false;
    for (const auto& rec : check_band_realizability(ProductEvaluator::periodic(bad)))
        some_fail = some_fail || !rec.pass;
    CHECK(some_fail);
}

TEST_CASE("coupled realizability margins and the interval convention") {
    Potential q = q_two_cos();
    BvpBSpectrum pos = bvpb_spectrum(q, 0.0, 1.0, 24);
    ProductEvaluator rp = ProductEvaluator::bvpb(pos.mu, pos.b);
    auto recs = check_bvpb_realizability(rp);
    REQUIRE(!recs.empty());
    for (const auto& rec : recs) CHECK(rec.pass);
    // with b > 0 the first interval starts at mu_0
    CHECK(recs[0].left == doctest::Approx(pos.mu[0]));

    BvpBSpectrum neg = bvpb_spectrum(q, 0.0, -1.0, 24);
    ProductEvaluator rn = ProductEvaluator::bvpb(neg.mu, neg.b);
    auto nrecs = check_bvpb_realizability(rn);
    REQUIRE(!nrecs.empty());
    for (const auto& rec : nrecs) CHECK(rec.pass);
    // with b < 0 the intervals shift down one index
    CHECK(nrecs[0].left == doctest::Approx(neg.mu[1]));

    // tampered spectrum: drag two eigenvalues together
    std::vector<double> bad = pos.mu;
    bad[1] = bad[0] + 0.02 * (bad[1] - bad[0]);
    std::sort(bad.begin(), bad.end());
    bool some_fail = false;
    for (const auto& rec : check_bvpb_realizability(ProductEvaluator::bvpb(bad, 1.0)))
        some_fail = some_fail || !rec.pass;
    CHECK(some_fail);
}

TEST_CASE("level-2 edges recovered from the p product") {
    Potential q = q_two_cos();
    BandSpectrum band = periodic_spectrum(q, 40);
    ProductEvaluator p = ProductEvaluator::periodic(band.lambda);
    std::vector<double> plus = plus_edges_from_p(p, 10);
    for (int i = 0; i < 20; ++i)
        CHECK(std::abs(plus[i] - band.lambda_plus[i]) <=
              1e-4 * (1.0 + std::abs(band.lambda_plus[i])));
}

TEST_CASE("asymptotic fits on constructed and forward sequences") {
    AsymptoticFit f = asymptotic_fit(squares(24, 3.0), AsymptoticModel::dirichlet);
    CHECK(f.alpha == doctest::Approx(3.0).epsilon(1e-12));
    for (double k : f.kappa) CHECK(std::abs(k) < 1e-9);
    CHECK(!f.diverging);

    // free weights have zero remainders
    std::vector<double> a0(24);
    for (int n = 1; n <= 24; ++n) a0[n - 1] = kPi / (2.0 * n * n);
    f = asymptotic_fit(a0, AsymptoticModel::weights);
    for (double k : f.kappa) CHECK(std::abs(k) < 1e-9);

    // oscillatory witness has zero mean; the fit should see that
    std::vector<double> gam = dirichlet_spectrum(q_two_cos(), 40);
    f = asymptotic_fit(gam, AsymptoticModel::dirichlet);
    CHECK(std::abs(f.alpha) <= 1e-2);
    CHECK(!f.diverging);

    // coupled model recovers (h, b)
    BvpBSpectrum bv = bvpb_spectrum(q_zero(), 0.0, 1.0, 32);
    f = asymptotic_fit(bv.mu, AsymptoticModel::bvpb);
    CHECK(std::abs(f.h) < 5e-2);
    CHECK(f.b == doctest::Approx(1.0).epsilon(1e-2));

    // linearly growing remainders are flagged
    std::vector<double> divergent(32);
    for (int n = 1; n <= 32; ++n) divergent[n - 1] = double(n) * n + n;
    f = asymptotic_fit(divergent, AsymptoticModel::dirichlet);
    CHECK(f.diverging);
}

TEST_CASE("discriminant values at symmetric gap endpoints") {
    Potential q = q_two_cos();
    BandSpectrum band = periodic_spectrum(q, 20);
    std::vector<double> gam = dirichlet_spectrum(q, 40);
    ProductEvaluator p = ProductEvaluator::periodic(band.lambda);
    ProductEvaluator d = ProductEvaluator::dirichlet(gam);
    double first = 0, second = 0;
    for (int n = 1; n <= 20; ++n) {
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        double Delta = 1.0 - p.eval(gam[n - 1]);
        double ddot = d.derivative_at_zero(n);
        CHECK(Delta * sign > 0);
        CHECK(ddot * sign > 0);
        double defect = std::abs(Delta * sign - 1.0);
        (n <= 10 ? first : second) = std::max(n <= 10 ? first : second, defect);
    }
    CHECK(second <= first + 1e-9);  // the defect decays with n
    CHECK(first <= 1e-3);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(ProductEvaluator::dirichlet(squares(8)), std::invalid_argument);
    std::vector<double> unsorted = squares(20);
    std::swap(unsorted[3], unsorted[4]);
    CHECK_THROWS_AS(ProductEvaluator::dirichlet(unsorted), characterization_error);
    ProductEvaluator d = ProductEvaluator::dirichlet(squares(20));
    CHECK_THROWS_AS(d.eval(1e6), std::domain_error);
    CHECK_THROWS_AS(d.derivative_at_zero(0), std::invalid_argument);
    CHECK_THROWS_AS(ProductEvaluator::bvpb(squares(20), 0.0), std::invalid_argument);
}
