#include <doctest.h>

#include <cmath>

#include "pilotgeom/coverage.hpp"
#include "pilotgeom/validation.hpp"

using namespace pilotgeom;

TEST_SUITE_BEGIN("coverage");

TEST_CASE("serving distance laws: support and sampling oracle") {
    NetworkConfig cfg = validation::benchmark_config();
    cfg.kappa = 1.0;  // r_c about 252.3 m
    const ServingDistanceLaw cc = serving_distance(RegionKind::cell_center, cfg);
    const ServingDistanceLaw ce = serving_distance(RegionKind::cell_edge, cfg);
    CHECK(cc.cdf(cc.r_c) == 1.0);
    CHECK(cc.cdf(0.0) == 0.0);
    CHECK(ce.cdf(ce.r_c) == 0.0);
    CHECK(ce.cdf(1e9) == doctest::Approx(1.0));

    // median against inverse-transform sampling
    RngStream rng(21, 0);
    const int n = 1000000;
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[i] = cc.quantile(rng.uniform());
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; i += 997)
        ks = std::max(ks, std::fabs((i + 1.0) / n - cc.cdf(draws[i])));
    CHECK(ks <= 0.002);
    const double median = draws[n / 2];
    CHECK(cc.cdf(median) == doctest::Approx(0.5).epsilon(0.01));
    CHECK(cc.quantile(0.5) == doctest::Approx(median).epsilon(0.005));
}

TEST_CASE("coverage tends to one at vanishing threshold and is monotone") {
    const AnalyticalModel model =
        AnalyticalModel::build(validation::benchmark_config());
    CHECK(model.coverage(RegionKind::cell_center, 1e-9) ==
          doctest::Approx(1.0).epsilon(1e-4));
    CHECK(model.coverage(RegionKind::cell_edge, 1e-9) ==
          doctest::Approx(1.0).epsilon(1e-3));
    for (RegionKind kind : {RegionKind::cell_center, RegionKind::cell_edge}) {
        double prev = 2.0;
        for (double db = -15.0; db <= 25.0; db += 5.0) {
            const double cov = model.coverage(kind, std::pow(10.0, db / 10.0));
            CHECK(cov <= prev + 1e-9);
            CHECK(cov >= 0.0);
            CHECK(cov <= 1.0);
            prev = cov;
        }
        // coverage decays slowly in the threshold (serving users can sit
        // arbitrarily close to the BS), so only a loose cap applies here
        CHECK(model.coverage(kind, 1e12) <= 0.01);
    }
    CHECK_THROWS_AS(model.coverage(RegionKind::cell_center, 0.0),
                    std::domain_error);
}

TEST_CASE("layer-cake identity: both threshold integration orders agree") {
    NetworkConfig cfg = validation::benchmark_config();
    cfg.kappa = 0.8;
    const AnalyticalModel model = AnalyticalModel::build(cfg);
    const double by_bits = model.se_threshold_integral(RegionKind::cell_center);
    // substitute T = 2^t - 1 and keep the same 40-bit truncation: integral of
    // P_c(T) / ((1+T) ln 2) over [0, 2^40 - 1]
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-7;
    double by_threshold = 0.0;
    double lo = 0.0;
    for (double bits : {1.0, 3.0, 6.0, 9.0, 12.0, 16.0, 20.0, 25.0, 30.0,
                        35.0, 40.0}) {
        const double hi = std::exp2(bits) - 1.0;
        by_threshold += integrate_1d(
            [&](double t) {
                return model.coverage(RegionKind::cell_center, t) /
                       ((1.0 + t) * std::log(2.0));
            },
            lo, hi, spec);
        lo = hi;
    }
    CHECK(by_bits == doctest::Approx(by_threshold).epsilon(1.5e-6));
}

TEST_CASE("training overhead scales spectral efficiency exactly") {
    NetworkConfig cfg = validation::benchmark_config();
    const AnalyticalModel model = AnalyticalModel::build(cfg);
    // with B = 100 and T_c = 200 every SE carries a factor 1/2
    const double integral = model.se_threshold_integral(RegionKind::cell_center);
    const double any =
        model.assignment(RegionKind::cell_center).any_pilot;
    CHECK(model.avg_user_se(RegionKind::cell_center) ==
          doctest::Approx(0.5 * any * integral).epsilon(1e-12));
}

TEST_CASE("cell spectral efficiency dominates its parts") {
    NetworkConfig cfg = validation::benchmark_config();
    const AnalyticalModel model = AnalyticalModel::build(cfg);
    const double cse = model.avg_cell_se();
    const double overhead = 0.5;
    const double cc_term = overhead * cfg.plan.cc_count *
                           model.utilization(RegionKind::cell_center) *
                           model.se_threshold_integral(RegionKind::cell_center);
    CHECK(cse >= cc_term - 1e-12);
    CHECK(cse > 0.0);
}

TEST_CASE("degenerate plan reduces the cell SE to the center term") {
    NetworkConfig cfg = validation::benchmark_config();
    cfg.plan = PilotPlan{58, 58, 0, 1, 200};
    cfg.utilization_override_cc = 1.0;
    const AnalyticalModel model = AnalyticalModel::build(cfg);
    const double overhead = 1.0 - 58.0 / 200.0;
    CHECK(model.avg_cell_se() ==
          doctest::Approx(overhead * 58.0 *
                          model.se_threshold_integral(RegionKind::cell_center))
              .epsilon(1e-12));
}

TEST_CASE("user and cell spectral efficiencies track the simulator") {
    // partition-rule operating points; the residual gap is the documented
    // price of the assignment/SINR independence approximation
    {
        NetworkConfig cfg = validation::benchmark_config();
        cfg.kappa = 0.8;
        cfg.plan = plan_from_rule(100, 3, 0.8, 200);
        cfg.group_inclusion = 1.0 / cfg.plan.reuse_factor;
        const AnalyticalModel model = AnalyticalModel::build(cfg);
        const SimulationSummary s = run_experiment(
            cfg, validation::benchmark_sim_options(), {0.0}, 2000, 88);
        const double rel =
            std::fabs(model.avg_user_se(RegionKind::cell_center) /
                          s.scalars.at("cc_user_se") -
                      1.0);
        CHECK(rel <= 0.07);
    }
    {
        NetworkConfig cfg = validation::benchmark_config();
        cfg.kappa = 1.0;
        cfg.plan = plan_from_rule(100, 3, 1.0, 200);
        cfg.group_inclusion = 1.0 / cfg.plan.reuse_factor;
        const AnalyticalModel model = AnalyticalModel::build(cfg);
        const SimulationSummary s = run_experiment(
            cfg, validation::benchmark_sim_options(), {0.0}, 2000, 88);
        const double rel =
            std::fabs(model.avg_cell_se() / s.scalars.at("cell_se") - 1.0);
        CHECK(rel <= 0.10);
    }
}

TEST_CASE("edge coverage conditioning requires an edge region") {
    NetworkConfig cfg = validation::benchmark_config();
    cfg.kappa = 6.0;  // essentially no cell keeps an edge region
    CHECK_THROWS_AS(AnalyticalModel::build(cfg),
                    DegenerateConditioningError);
}

TEST_SUITE_END();
