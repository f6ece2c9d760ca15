#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pilotgeom/numerics.hpp"

using namespace pilotgeom;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_SUITE_BEGIN("numerics");

TEST_CASE("quadrature handles the basic closed forms") {
    QuadratureSpec spec;
    CHECK(integrate_1d([](double x) { return x; }, 0.0, 1.0, spec) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(integrate_1d([](double x) { return std::exp(-x); }, 0.0, kInf,
                       spec) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::fabs(integrate_1d([](double x) { return std::sin(x); }, 0.0,
                                 2.0 * kPi, spec)) <= spec.abs_tol);
}

TEST_CASE("quadrature is exact on cubics") {
    QuadratureSpec spec;
    RngStream rng(42, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const double c0 = rng.uniform(-5, 5), c1 = rng.uniform(-5, 5);
        const double c2 = rng.uniform(-5, 5), c3 = rng.uniform(-5, 5);
        const double a = rng.uniform(-3, 3);
        const double b = a + rng.uniform(0.1, 4.0);
        auto poly = [&](double x) {
            return c0 + x * (c1 + x * (c2 + x * c3));
        };
        auto antideriv = [&](double x) {
            return x * (c0 + x * (c1 / 2 + x * (c2 / 3 + x * c3 / 4)));
        };
        const double expected = antideriv(b) - antideriv(a);
        CHECK(std::fabs(integrate_1d(poly, a, b, spec) - expected) <=
              spec.abs_tol * (1.0 + std::fabs(expected)));
    }
}

TEST_CASE("quadrature reports non-convergence with its best estimate") {
    QuadratureSpec spec;
    spec.max_subdivisions = 2;
    spec.abs_tol = 1e-14;
    spec.rel_tol = 1e-14;
    CHECK_THROWS_AS(
        integrate_1d([](double x) { return std::sin(50.0 * x); }, 0.0, 20.0,
                     spec),
        QuadratureError);
    try {
        integrate_1d([](double x) { return std::sin(50.0 * x); }, 0.0, 20.0,
                     spec);
    } catch (const QuadratureError& e) {
        CHECK(std::isfinite(e.best_estimate()));
    }
}

TEST_CASE("root finding on monotone brackets") {
    CHECK(find_root_monotone([](double x) { return x - 2.0; }, 0.0, 4.0,
                             1e-12) == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(find_root_monotone([](double x) { return std::exp(-x) - 0.5; }, 0.0,
                             10.0, 1e-12) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(std::fabs(find_root_monotone([](double x) { return x * x * x; },
                                       -1.0, 2.0, 1e-12)) < 1e-10);
}

TEST_CASE("root is independent of which endpoint is negative") {
    auto f = [](double x) { return std::atan(x) - 0.37; };
    auto g = [&](double x) { return -f(x); };
    const double r1 = find_root_monotone(f, -2.0, 5.0, 1e-13);
    const double r2 = find_root_monotone(g, -2.0, 5.0, 1e-13);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-10));
}

TEST_CASE("root finding rejects a bracket without sign change") {
    CHECK_THROWS_AS(find_root_monotone([](double x) { return x * x + 1.0; },
                                       -1.0, 1.0, 1e-9),
                    BracketError);
}

TEST_CASE("regularized incomplete beta matches closed forms") {
    for (double x : {0.1, 0.35, 0.8}) {
        CHECK(regularized_incomplete_beta(x, 1.0, 1.0) ==
              doctest::Approx(x).epsilon(1e-12));
        CHECK(regularized_incomplete_beta(x, 2.0, 1.0) ==
              doctest::Approx(x * x).epsilon(1e-12));
        CHECK(regularized_incomplete_beta(x, 1.0, 2.0) ==
              doctest::Approx(1.0 - (1.0 - x) * (1.0 - x)).epsilon(1e-12));
    }
    for (double a : {0.5, 3.0, 40.0})
        CHECK(regularized_incomplete_beta(0.5, a, a) ==
              doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("identical streams reproduce identical draws") {
    RngStream a(1234, 7), b(1234, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct stream ids separate") {
    RngStream a(1234, 1), b(1234, 2);
    int equal = 0;
    for (int i = 0; i < 100; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("uniform mean obeys the law of large numbers") {
    RngStream rng(5, 0);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += rng.uniform();
    CHECK(std::fabs(sum / n - 0.5) <= 0.0015);
}

TEST_CASE("poisson sampler moments") {
    RngStream rng(99, 0);
    for (double mu : {4.2, 120.0}) {
        const int n = 200000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = rng.poisson(mu);
            sum += k;
            sq += k * k;
        }
        const double mean = sum / n;
        const double var = sq / n - mean * mean;
        CHECK(std::fabs(mean - mu) <= 3.0 * std::sqrt(mu / n));
        CHECK(var == doctest::Approx(mu).epsilon(0.05));
    }
}

TEST_CASE("zero-truncated poisson sampler matches its mean") {
    RngStream rng(7, 3);
    for (double mu : {0.05, 1.5, 40.0}) {
        const int n = 200000;
        double sum = 0.0;
        int min_seen = 1 << 30;
        for (int i = 0; i < n; ++i) {
            const int k = rng.zero_truncated_poisson(mu);
            sum += k;
            min_seen = std::min(min_seen, k);
        }
        CHECK(min_seen >= 1);
        const double expected = mu / -std::expm1(-mu);
        CHECK(sum / n == doctest::Approx(expected).epsilon(0.01));
    }
}

TEST_CASE("substreams are reproducible and distinct") {
    RngStream base(11, 0);
    RngStream s1 = base.substream(4);
    RngStream s2 = base.substream(4);
    RngStream s3 = base.substream(5);
    CHECK(s1.next_u64() == s2.next_u64());
    RngStream s4 = base.substream(4);
    CHECK(s4.next_u64() != s3.next_u64());
}

TEST_SUITE_END();
