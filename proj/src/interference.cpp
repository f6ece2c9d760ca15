#include "pilotgeom/interference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace pilotgeom {

namespace {

std::mutex g_inv_moment_mutex;

// single-panel Gauss-Kronrod for short grid segments
double gk_panel(const std::function<double(double)>& f, double a, double b) {
    QuadratureSpec spec;
    spec.abs_tol = 1e-14;
    spec.rel_tol = 1e-11;
    spec.max_subdivisions = 60;
    return integrate_1d(f, a, b, spec);
}

}  // namespace

InverseMomentResult cc_unit_inverse_moment(double kappa, double c2) {
    static std::map<std::pair<double, double>, InverseMomentResult> cache;
    const std::pair<double, double> key{kappa, c2};
    {
        std::lock_guard lock(g_inv_moment_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double rc_unit = scaled_threshold_radius(kappa, c2);
    InverseMomentResult res;
    try {
        const MixedAreaDistribution dist =
            build_area_distribution(RegionKind::cell_center, 1.0, rc_unit);
        res = inverse_area_moment(dist, false);
    } catch (const FitRangeError&) {
        // vanishing threshold radius: the conditional law concentrates at its
        // mean (the beta shapes leave their brackets), so use the
        // zero-variance limit of the mixed inverse moment
        const double atom = kPi * rc_unit * rc_unit;
        const double p = prob_disc_inside_cell(1.0, rc_unit);
        const ConditionalMoments cm =
            conditional_area_moments(RegionKind::cell_center, 1.0, rc_unit);
        res.value = p / atom + (1.0 - p) / cm.mean;
        res.cutoff_sensitive = false;
    }
    std::lock_guard lock(g_inv_moment_mutex);
    cache.emplace(key, res);
    return res;
}

double cc_pair_correlation(double r_scaled, double kappa, double c2) {
    if (r_scaled < 0.0)
        throw std::domain_error("cc_pair_correlation: r_scaled must be >= 0");
    const double im = cc_unit_inverse_moment(kappa, c2).value;
    return -std::expm1(-2.0 * kPi * r_scaled * r_scaled * im);
}

double ce_pair_correlation(double r_scaled, double kappa, double c2,
                           double p_has_edge) {
    const double rc = scaled_threshold_radius(kappa, c2);
    if (r_scaled <= rc) return 0.0;
    const double coeff =
        kPi * (14.0 / 5.0) * p_has_edge * std::exp(kappa * kappa / c2);
    return -std::expm1(-coeff * (r_scaled * r_scaled - rc * rc));
}

// --- RadialDensityModel ---

double RadialDensityModel::density(double r) const {
    if (r <= r_start_) return 0.0;
    if (kind_ == RegionKind::cell_center)
        return plateau_ * -std::expm1(-cc_exponent_scale_ * r * r);
    return plateau_ *
           -std::expm1(-ce_exponent_scale_ * (r * r - r_c_ * r_c_));
}

void RadialDensityModel::build_grid() {
    const double scale = 1.0 / std::sqrt(lambda0_);
    r_up_ = std::max(8.0 * scale, 4.0 * r_c_);
    const int n = 160;
    nodes_.resize(n);
    // log-spaced offsets above the support start
    const double lo = 1e-4 * scale;
    const double hi = r_up_ - r_start_;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        nodes_[i] = r_start_ + lo * std::pow(hi / lo, t);
    }
    nodes_.front() = r_start_ + lo;
    nodes_.back() = r_up_;
    cum_.assign(n, 0.0);
    auto integrand = [this](double t) { return 2.0 * kPi * t * density(t); };
    cum_[0] = gk_panel(integrand, r_start_, nodes_[0]);
    for (int i = 1; i < n; ++i)
        cum_[i] = cum_[i - 1] + gk_panel(integrand, nodes_[i - 1], nodes_[i]);
}

RadialDensityModel RadialDensityModel::cc_pilot(double lambda0, double kappa,
                                                double c2,
                                                double utilization) {
    RadialDensityModel m;
    m.kind_ = RegionKind::cell_center;
    m.lambda0_ = lambda0;
    m.kappa_ = kappa;
    m.c2_ = c2;
    m.r_c_ = kappa / std::sqrt(kPi * c2 * lambda0);
    m.plateau_ = lambda0 * utilization;
    m.cc_exponent_scale_ =
        2.0 * kPi * lambda0 * cc_unit_inverse_moment(kappa, c2).value;
    m.r_start_ = 0.0;
    m.build_grid();
    return m;
}

RadialDensityModel RadialDensityModel::ce_pilot(double lambda0, double kappa,
                                                double c2, double utilization,
                                                double p_has_edge,
                                                double group_inclusion) {
    RadialDensityModel m;
    m.kind_ = RegionKind::cell_edge;
    m.lambda0_ = lambda0;
    m.kappa_ = kappa;
    m.c2_ = c2;
    m.r_c_ = kappa / std::sqrt(kPi * c2 * lambda0);
    m.plateau_ = lambda0 * utilization * p_has_edge * group_inclusion;
    m.ce_exponent_scale_ = kPi * (14.0 / 5.0) *
                           std::exp(kappa * kappa / c2) * p_has_edge * lambda0;
    m.r_start_ = m.r_c_;
    m.build_grid();
    return m;
}

double RadialDensityModel::intensity(double r) const {
    if (r <= r_start_) return 0.0;
    auto integrand = [this](double t) { return 2.0 * kPi * t * density(t); };
    if (r >= r_up_)
        return cum_.back() + plateau_ * kPi * (r * r - r_up_ * r_up_);
    if (r <= nodes_.front())
        return gauss_kronrod_panel(integrand, r_start_, r);
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return cum_[i] + gauss_kronrod_panel(integrand, nodes_[i], r);
}

double RadialDensityModel::nearest_cdf(double d) const {
    return -std::expm1(-intensity(d));
}

double RadialDensityModel::nearest_pdf(double d) const {
    return 2.0 * kPi * d * density(d) * std::exp(-intensity(d));
}

double RadialDensityModel::nearest_quantile(double p) const {
    if (!(p >= 0.0 && p < 1.0))
        throw std::domain_error("nearest_quantile: p must be in [0, 1)");
    if (p == 0.0) return r_start_;
    const double target = -std::log1p(-p);
    double hi = r_up_;
    while (intensity(hi) < target) hi *= 2.0;
    return find_root_monotone(
        [&](double d) { return intensity(d) - target; }, r_start_, hi,
        1e-12 * hi);
}

double mean_residual_interference(const RadialDensityModel& model, double d_hat,
                                  double alpha) {
    if (!(alpha > 1.0))
        throw DivergenceError(
            "mean_residual_interference: needs 2*alpha > 2 for integrability");
    if (!(d_hat > 0.0))
        throw std::domain_error("mean_residual_interference: d_hat must be > 0");
    const double tail_pow = 2.0 - 2.0 * alpha;
    const double r_far = std::max(model.grid_upper(), d_hat);
    const double tail = 2.0 * kPi * model.plateau() *
                        std::pow(r_far, tail_pow) / (2.0 * alpha - 2.0);
    if (d_hat >= r_far) return tail * std::pow(d_hat / r_far, tail_pow);
    QuadratureSpec spec;
    spec.abs_tol = 1e-16;
    spec.rel_tol = 1e-9;
    const double body = integrate_1d(
        [&](double r) {
            return 2.0 * kPi * std::pow(r, 1.0 - 2.0 * alpha) *
                   model.density(r);
        },
        d_hat, r_far, spec);
    return body + tail;
}

ResidualInterferenceTable::ResidualInterferenceTable(
    const RadialDensityModel& model, double alpha)
    : model_(&model), alpha_(alpha) {
    if (!(alpha > 1.0))
        throw DivergenceError(
            "ResidualInterferenceTable: needs 2*alpha > 2 for integrability");
    r_up_ = model.grid_upper();
    tail_coeff_ = 2.0 * kPi * model.plateau() / (2.0 * alpha - 2.0);
    // nodes: log-spaced from well below the typical nearest distance
    const double lo = 1e-3 / std::sqrt(model.lambda0());
    const double start =
        model.kind() == RegionKind::cell_edge ? model.r_c() + lo * 1e-3 : lo;
    const int n = 160;
    nodes_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        nodes_[i] = start * std::pow(r_up_ / start, t);
    }
    nodes_.back() = r_up_;
    tail_.assign(n, 0.0);
    tail_[n - 1] = tail_coeff_ * std::pow(r_up_, 2.0 - 2.0 * alpha_);
    auto integrand = [&](double r) {
        return 2.0 * kPi * std::pow(r, 1.0 - 2.0 * alpha_) *
               model_->density(r);
    };
    for (int i = n - 2; i >= 0; --i)
        tail_[i] = tail_[i + 1] + gk_panel(integrand, nodes_[i], nodes_[i + 1]);
}

double ResidualInterferenceTable::operator()(double d) const {
    if (d >= r_up_) return tail_coeff_ * std::pow(d, 2.0 - 2.0 * alpha_);
    auto integrand = [&](double r) {
        return 2.0 * kPi * std::pow(r, 1.0 - 2.0 * alpha_) *
               model_->density(r);
    };
    if (d <= nodes_.front()) {
        QuadratureSpec spec;
        spec.abs_tol = 1e-16;
        spec.rel_tol = 1e-9;
        return tail_.front() +
               integrate_1d(integrand, std::max(d, 0.0), nodes_.front(), spec);
    }
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), d);
    const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return tail_[i + 1] + gauss_kronrod_panel(integrand, d, nodes_[i + 1]);
}

}  // namespace pilotgeom
