#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pilotgeom/interference.hpp"
#include "pilotgeom/simulate.hpp"
#include "pilotgeom/validation.hpp"

using namespace pilotgeom;

TEST_SUITE_BEGIN("interference");

TEST_CASE("center pair correlation: exclusion at zero, far field one") {
    CHECK(cc_pair_correlation(0.0, 0.8) == 0.0);
    CHECK(cc_pair_correlation(50.0, 0.8) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cc_pair_correlation(0.5, 0.8) > 0.0);
    CHECK(cc_pair_correlation(0.5, 0.8) < 1.0);
}

TEST_CASE("tiny threshold radius recovers the homogeneous far field") {
    // beyond a modest multiple of the vanishing exclusion radius the pair
    // correlation is indistinguishable from a homogeneous PPP
    for (double r : {0.04, 0.05, 0.1, 0.3, 1.0})
        CHECK(cc_pair_correlation(r, 0.05) >= 0.95);
    for (double r : {0.04, 0.05, 0.1, 0.3, 1.0})
        CHECK(cc_pair_correlation(r, 0.05) <= 1.0);
}

TEST_CASE("edge pair correlation: zero below the threshold radius") {
    const double kappa = 0.4, c2 = 1.25;
    const double rc = scaled_threshold_radius(kappa, c2);
    CHECK(ce_pair_correlation(rc, kappa, c2, 1.0) == 0.0);
    CHECK(ce_pair_correlation(rc * 0.5, kappa, c2, 1.0) == 0.0);
    CHECK(ce_pair_correlation(40.0, kappa, c2, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("radial density: support, plateau, bound") {
    RadialDensityModel cc = RadialDensityModel::cc_pilot(4e-6, 0.6, 1.25, 0.65);
    CHECK(cc.density(0.0) == 0.0);
    CHECK(cc.density(1e6) == doctest::Approx(cc.plateau()).epsilon(1e-12));
    CHECK(cc.plateau() == doctest::Approx(4e-6 * 0.65));
    RadialDensityModel ce =
        RadialDensityModel::ce_pilot(4e-6, 0.6, 1.25, 0.98, 0.9997, 1.0);
    CHECK(ce.density(ce.r_c()) == 0.0);
    CHECK(ce.density(ce.r_c() * 0.7) == 0.0);
    CHECK(ce.density(1e6) == doctest::Approx(ce.plateau()).epsilon(1e-12));
    for (double r = 0.0; r < 4000.0; r += 97.0) {
        CHECK(cc.density(r) <= 4e-6);
        CHECK(ce.density(r) <= 4e-6);
    }
}

TEST_CASE("radial density scales with the BS density at fixed kappa") {
    const double c = 4.0;
    RadialDensityModel base = RadialDensityModel::cc_pilot(4e-6, 0.6, 1.25, 0.65);
    RadialDensityModel scaled =
        RadialDensityModel::cc_pilot(c * 4e-6, 0.6, 1.25, 0.65);
    for (double r : {80.0, 200.0, 500.0, 1200.0})
        CHECK(scaled.density(r / std::sqrt(c)) ==
              doctest::Approx(c * base.density(r)).epsilon(1e-9));
}

TEST_CASE("intensity measure: zero at origin, monotone, derivative identity") {
    RadialDensityModel cc = RadialDensityModel::cc_pilot(4e-6, 0.6, 1.25, 0.65);
    CHECK(cc.intensity(0.0) == 0.0);
    double prev = 0.0;
    for (double r = 20.0; r < 6000.0; r *= 1.4) {
        const double v = cc.intensity(r);
        CHECK(v >= prev);
        prev = v;
    }
    for (double r : {150.0, 400.0, 900.0, 2500.0}) {
        const double h = 1e-4 * r;
        const double deriv =
            (cc.intensity(r + h) - cc.intensity(r - h)) / (2.0 * h);
        CHECK(deriv / (2.0 * kPi * r) ==
              doctest::Approx(cc.density(r)).epsilon(1e-4));
    }
}

TEST_CASE("intensity matches same-pilot interferer counts in full networks") {
    // tested at radii where the realization budget resolves a few percent
    NetworkConfig cfg = validation::benchmark_config();
    SimOptions opts = validation::benchmark_sim_options();
    const AnalyticalModel model = AnalyticalModel::build(cfg);
    RngStream base(1717, 0);
    const int n_real = 1000;
    const std::vector<double> radii = {350.0, 500.0, 800.0, 1200.0};
    std::vector<double> counts(radii.size(), 0.0);
    for (int i = 0; i < n_real; ++i) {
        RngStream rng = base.substream(i);
        Realization real = run_realization(cfg, opts, rng);
        if (real.tagged < 0) continue;
        const Vec2 bs0 = real.bs.points[real.tagged];
        for (int idx : real.users_by_pilot[0]) {
            const UserRecord& u = real.users[idx];
            if (u.cell == real.tagged) continue;
            const double d = norm(u.pos - bs0);
            for (std::size_t k = 0; k < radii.size(); ++k)
                if (d <= radii[k]) counts[k] += 1.0;
        }
    }
    const RadialDensityModel& field =
        model.interferer_field(RegionKind::cell_center);
    for (std::size_t k = 0; k < radii.size(); ++k)
        CHECK(field.intensity(radii[k]) ==
              doctest::Approx(counts[k] / n_real).epsilon(0.05));
}

TEST_CASE("dominant interferer law: cdf, quantile round trip") {
    RadialDensityModel ce =
        RadialDensityModel::ce_pilot(4e-6, 0.6, 1.25, 0.98, 0.9997, 1.0);
    CHECK(ce.nearest_cdf(0.0) == 0.0);
    CHECK(ce.nearest_cdf(ce.r_c()) == 0.0);
    CHECK(ce.nearest_cdf(1e5) == doctest::Approx(1.0).epsilon(1e-9));
    for (double d : {300.0, 600.0, 1500.0}) {
        const double p = ce.nearest_cdf(d);
        CHECK(ce.nearest_quantile(p) == doctest::Approx(d).epsilon(1e-6));
    }
    // pdf integrates to the cdf increment
    QuadratureSpec spec;
    const double mass = integrate_1d(
        [&](double d) { return ce.nearest_pdf(d); }, 0.0, 2000.0, spec);
    CHECK(mass == doctest::Approx(ce.nearest_cdf(2000.0)).epsilon(1e-6));
}

TEST_CASE("mean residual interference: limits and monotonicity") {
    RadialDensityModel cc = RadialDensityModel::cc_pilot(4e-6, 0.6, 1.25, 0.65);
    const double alpha = 3.7;
    CHECK(mean_residual_interference(cc, 1e8, alpha) <= 1e-40);
    double prev = std::numeric_limits<double>::infinity();
    for (double d : {5.0, 50.0, 200.0, 600.0, 2000.0, 6000.0}) {
        const double v = mean_residual_interference(cc, d, alpha);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(mean_residual_interference(cc, 100.0, 0.9),
                    DivergenceError);

    // the precomputed table agrees with direct quadrature
    ResidualInterferenceTable table(cc, alpha);
    for (double d : {30.0, 140.0, 500.0, 1700.0, 5200.0})
        CHECK(table(d) ==
              doctest::Approx(mean_residual_interference(cc, d, alpha))
                  .epsilon(1e-6));
}

TEST_CASE("mean residual interference matches the conditional Campbell oracle") {
    // spec example at kappa = 0.6: condition on the nearest same-pilot
    // interferer landing near 1/sqrt(lambda0) and average the rest
    NetworkConfig cfg = validation::benchmark_config();
    SimOptions opts = validation::benchmark_sim_options();
    const AnalyticalModel model = AnalyticalModel::build(cfg);
    const double d_hat = 1.0 / std::sqrt(cfg.lambda0);
    RngStream base(1718, 0);
    double acc = 0.0;
    long hits = 0;
    for (int i = 0; i < 2000 && hits < 500; ++i) {
        RngStream rng = base.substream(i);
        Realization real = run_realization(cfg, opts, rng);
        if (real.tagged < 0) continue;
        const Vec2 bs0 = real.bs.points[real.tagged];
        // every center pilot contributes one conditional sample
        for (int p = 0; p < cfg.plan.cc_count; ++p) {
            double nearest = 1e30;
            double total = 0.0;
            for (int idx : real.users_by_pilot[p]) {
                const UserRecord& u = real.users[idx];
                if (u.cell == real.tagged) continue;
                const double d = norm(u.pos - bs0);
                nearest = std::min(nearest, d);
                total += std::pow(d, -2.0 * cfg.alpha);
            }
            if (std::fabs(nearest - d_hat) > 0.02 * d_hat) continue;
            acc += total - std::pow(nearest, -2.0 * cfg.alpha);
            ++hits;
        }
    }
    REQUIRE(hits >= 100);
    const double oracle = acc / hits;
    CHECK(model.residual_interference(RegionKind::cell_center, d_hat) ==
          doctest::Approx(oracle).epsilon(0.10));
}

TEST_SUITE_END();
