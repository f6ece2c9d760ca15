#include "pilotgeom/coverage.hpp"

#include <cmath>

namespace pilotgeom {

double ServingDistanceLaw::cdf(double d) const {
    const double s = kPi * c2 * lambda0;
    if (kind == RegionKind::cell_center) {
        if (d <= 0.0) return 0.0;
        if (d >= r_c) return 1.0;
        return std::expm1(-s * d * d) / std::expm1(-s * r_c * r_c);
    }
    if (d <= r_c) return 0.0;
    return -std::expm1(-s * (d * d - r_c * r_c));
}

double ServingDistanceLaw::pdf(double d) const {
    const double s = kPi * c2 * lambda0;
    if (kind == RegionKind::cell_center) {
        if (d <= 0.0 || d > r_c) return 0.0;
        return 2.0 * s * d * std::exp(-s * d * d) /
               -std::expm1(-s * r_c * r_c);
    }
    if (d <= r_c) return 0.0;
    return 2.0 * s * d * std::exp(-s * (d * d - r_c * r_c));
}

double ServingDistanceLaw::quantile(double p) const {
    const double s = kPi * c2 * lambda0;
    if (kind == RegionKind::cell_center) {
        const double scaled = p * -std::expm1(-s * r_c * r_c);
        return std::sqrt(-std::log1p(-scaled) / s);
    }
    return std::sqrt(r_c * r_c - std::log1p(-p) / s);
}

double ServingDistanceLaw::upper_limit() const {
    const double s = kPi * c2 * lambda0;
    if (kind == RegionKind::cell_center) return r_c;
    return std::sqrt(r_c * r_c + 32.24 / s);  // exp envelope below 1e-14
}

ServingDistanceLaw serving_distance(RegionKind kind, const NetworkConfig& cfg) {
    ServingDistanceLaw law;
    law.kind = kind;
    law.lambda0 = cfg.lambda0;
    law.c2 = cfg.c2;
    law.r_c = cfg.r_c();
    if (kind == RegionKind::cell_center && !(law.r_c > 0.0))
        throw std::domain_error(
            "serving_distance: cell-center law needs r_c > 0");
    return law;
}

AnalyticalModel AnalyticalModel::build(const NetworkConfig& cfg) {
    cfg.validate();
    AnalyticalModel m;
    m.cfg_ = cfg;
    const double r_c = cfg.r_c();
    m.cc_area_ =
        build_area_distribution(RegionKind::cell_center, cfg.lambda0, r_c);
    m.ce_area_ =
        build_area_distribution(RegionKind::cell_edge, cfg.lambda0, r_c);
    m.p_has_edge_ = 1.0 - m.ce_area_.atom_mass;
    if (m.p_has_edge_ < 1e-12)
        throw DegenerateConditioningError(
            "AnalyticalModel: cells almost surely have no edge region");

    LoadModel load{cfg.lambda_u, &m.cc_area_, &m.ce_area_};
    m.assign_cc_ =
        pilot_assignment_probability(RegionKind::cell_center, cfg.plan, load);
    m.assign_ce_ =
        pilot_assignment_probability(RegionKind::cell_edge, cfg.plan, load);
    m.util_cc_ =
        cfg.utilization_override_cc
            ? *cfg.utilization_override_cc
            : pilot_utilization_probability(RegionKind::cell_center, cfg.plan,
                                            load);
    m.util_ce_ =
        cfg.utilization_override_ce
            ? *cfg.utilization_override_ce
            : pilot_utilization_probability(RegionKind::cell_edge, cfg.plan,
                                            load);

    m.inv_moment_unit_ = cc_unit_inverse_moment(cfg.kappa, cfg.c2);
    m.cc_field_ = std::make_shared<RadialDensityModel>(RadialDensityModel::cc_pilot(
        cfg.lambda0, cfg.kappa, cfg.c2, m.util_cc_));
    m.ce_field_ = std::make_shared<RadialDensityModel>(RadialDensityModel::ce_pilot(
        cfg.lambda0, cfg.kappa, cfg.c2, m.util_ce_, m.p_has_edge_,
        cfg.group_inclusion));
    m.cc_resid_ =
        std::make_shared<ResidualInterferenceTable>(*m.cc_field_, cfg.alpha);
    m.ce_resid_ =
        std::make_shared<ResidualInterferenceTable>(*m.ce_field_, cfg.alpha);

    m.serving_cc_ = serving_distance(RegionKind::cell_center, cfg);
    m.serving_ce_ = serving_distance(RegionKind::cell_edge, cfg);
    return m;
}

namespace {

// P[dominant distance > d*] where d* solves
// d_hat^(-2a) + E[I_rem | d_hat] = d^(-2a) / T over decreasing g.
double inner_coverage(const RadialDensityModel& field,
                      const ResidualInterferenceTable& resid, double alpha,
                      double target, double eps, double scale) {
    auto g = [&](double d_hat) {
        return std::pow(d_hat, -2.0 * alpha) + resid(d_hat);
    };
    if (g(eps) <= target) return std::exp(-field.intensity(eps));
    double hi = scale;
    int guard = 0;
    while (g(hi) > target && guard++ < 80) hi *= 2.0;
    if (guard >= 80) return 0.0;
    // g spans many decades; the root is well conditioned in log-log space
    const double log_target = std::log(target);
    const double ln_star = find_root_monotone(
        [&](double ln_d) { return std::log(g(std::exp(ln_d))) - log_target; },
        std::log(eps), std::log(hi), 1e-10);
    return std::exp(-field.intensity(std::exp(ln_star)));
}

}  // namespace

double AnalyticalModel::coverage(RegionKind kind, double threshold) const {
    if (!(threshold > 0.0))
        throw std::domain_error("coverage: threshold must be > 0");
    const ServingDistanceLaw& law = serving_law(kind);
    const RadialDensityModel& field = interferer_field(kind);
    const ResidualInterferenceTable& resid =
        kind == RegionKind::cell_center ? *cc_resid_ : *ce_resid_;
    const double eps = 1e-3 / std::sqrt(cfg_.lambda0);
    const double scale = field.grid_upper();
    const double alpha = cfg_.alpha;

    QuadratureSpec spec;
    spec.abs_tol = 1e-10;
    spec.rel_tol = 1e-6;
    const double lo = kind == RegionKind::cell_center ? 0.0 : law.r_c;
    const double hi = law.upper_limit();
    return integrate_1d(
        [&](double d) {
            const double target = std::pow(d, -2.0 * alpha) / threshold;
            return law.pdf(d) *
                   inner_coverage(field, resid, alpha, target, eps, scale);
        },
        lo, hi, spec);
}

double AnalyticalModel::se_threshold_integral(RegionKind kind) const {
    QuadratureSpec spec;
    spec.abs_tol = 1e-10;
    spec.rel_tol = 1e-7;
    double acc = 0.0;
    for (int k = 0; k < 40; ++k) {
        if (k > 0 && coverage(kind, std::exp2(static_cast<double>(k)) - 1.0) <
                         1e-6)
            break;
        acc += integrate_1d(
            [&](double t) { return coverage(kind, std::exp2(t) - 1.0); },
            static_cast<double>(k), static_cast<double>(k + 1), spec);
    }
    return acc;
}

double AnalyticalModel::avg_user_se(RegionKind kind) const {
    const double overhead =
        1.0 - static_cast<double>(cfg_.plan.total) / cfg_.plan.coherence_symbols;
    const AssignmentProbability a = assignment(kind);
    if (a.any_pilot <= 0.0) return 0.0;
    return overhead * a.any_pilot * se_threshold_integral(kind);
}

double AnalyticalModel::avg_cell_se() const {
    const double overhead =
        1.0 - static_cast<double>(cfg_.plan.total) / cfg_.plan.coherence_symbols;
    double cc_term = 0.0, ce_term = 0.0;
    if (cfg_.plan.cc_count > 0 && util_cc_ > 0.0)
        cc_term = cfg_.plan.cc_count * util_cc_ *
                  se_threshold_integral(RegionKind::cell_center);
    if (cfg_.plan.ce_count > 0 && util_ce_ > 0.0)
        ce_term = p_has_edge_ * cfg_.plan.ce_count * util_ce_ *
                  se_threshold_integral(RegionKind::cell_edge);
    return overhead * (cc_term + ce_term);
}

}  // namespace pilotgeom
