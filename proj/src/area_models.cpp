#include "pilotgeom/area_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>

namespace pilotgeom {

namespace {

std::mutex g_cache_mutex;

// Second moment of the region area at unit density, keyed by r_c*sqrt(lambda).
std::map<double, double>& m2_cache(RegionKind kind) {
    static std::map<double, double> cc, ce;
    return kind == RegionKind::cell_center ? cc : ce;
}

double second_moment_unit(double kt, RegionKind kind) {
    {
        std::lock_guard lock(g_cache_mutex);
        auto& cache = m2_cache(kind);
        auto it = cache.find(kt);
        if (it != cache.end()) return it->second;
    }
    const double lo = kind == RegionKind::cell_center ? 0.0 : kt;
    const double hi = kind == RegionKind::cell_center ? kt : kt + 6.5;
    double value = 0.0;
    if (hi > lo) {
        QuadratureSpec axis;
        axis.abs_tol = 1e-10;
        axis.rel_tol = 1e-6;
        auto inner_u = [&](double r1, double r2) {
            return integrate_1d(
                [&](double u) {
                    return std::exp(-union_two_circles_area(r1, r2, u));
                },
                0.0, 2.0 * kPi, axis);
        };
        auto inner_r2 = [&](double r1) {
            return integrate_1d(
                [&](double r2) { return r2 * inner_u(r1, r2); }, lo, hi, axis);
        };
        value = 2.0 * kPi *
                integrate_1d([&](double r1) { return r1 * inner_r2(r1); }, lo,
                             hi, axis);
    }
    std::lock_guard lock(g_cache_mutex);
    m2_cache(kind).emplace(kt, value);
    return value;
}

}  // namespace

AreaMoments cc_area_moments(double lambda0, double r_c) {
    if (!(lambda0 > 0.0) || r_c < 0.0)
        throw std::domain_error("cc_area_moments: need lambda0 > 0, r_c >= 0");
    AreaMoments m;
    m.m1 = -std::expm1(-kPi * lambda0 * r_c * r_c) / lambda0;
    const double kt = r_c * std::sqrt(lambda0);
    m.m2 = second_moment_unit(kt, RegionKind::cell_center) / (lambda0 * lambda0);
    return m;
}

AreaMoments ce_area_moments(double lambda0, double r_c) {
    if (!(lambda0 > 0.0) || r_c < 0.0)
        throw std::domain_error("ce_area_moments: need lambda0 > 0, r_c >= 0");
    AreaMoments m;
    m.m1 = std::exp(-kPi * lambda0 * r_c * r_c) / lambda0;
    const double kt = r_c * std::sqrt(lambda0);
    m.m2 = second_moment_unit(kt, RegionKind::cell_edge) / (lambda0 * lambda0);
    return m;
}

double prob_disc_inside_cell(double lambda0, double r_c) {
    return std::exp(-4.0 * kPi * lambda0 * r_c * r_c);
}

CellSampleBatch harvest_interior_cells(double lambda0, double r_c,
                                       long n_target, RngStream stream,
                                       double window_factor,
                                       double guard_factor) {
    if (!(lambda0 > 0.0))
        throw std::domain_error("harvest_interior_cells: lambda0 must be > 0");
    Window window;
    window.half_width = window_factor / std::sqrt(lambda0);
    window.guard_band = guard_factor / std::sqrt(lambda0);
    CellSampleBatch batch;
    batch.cc_areas.reserve(n_target);
    std::uint64_t rep = 0;
    while (static_cast<long>(batch.cc_areas.size()) < n_target) {
        RngStream rng = stream.substream(rep++);
        PointPattern pattern = sample_ppp(lambda0, window, rng);
        for (int i = 0; i < static_cast<int>(pattern.points.size()); ++i) {
            if (!window.in_interior(pattern.points[i])) continue;
            CellGeometry cell = build_cell(i, pattern, r_c);
            batch.cc_areas.push_back(cell.cc_area);
            batch.ce_areas.push_back(cell.ce_area);
            batch.r_m.push_back(cell.r_m);
            batch.r_M.push_back(cell.r_M);
        }
        if (rep > 1000000) break;  // safety valve for absurd targets
    }
    return batch;
}

namespace {

std::map<double, double>& rmax_prob_cache() {
    static std::map<double, double> cache;
    return cache;
}

double prob_no_edge_region_mc(double kt) {
    {
        std::lock_guard lock(g_cache_mutex);
        auto it = rmax_prob_cache().find(kt);
        if (it != rmax_prob_cache().end()) return it->second;
    }
    // unit-density harvest on an internal fixed stream; deterministic
    CellSampleBatch batch =
        harvest_interior_cells(1.0, kt, 40000, RngStream(0x50c4e7, 77));
    long hits = 0;
    for (double r : batch.r_M)
        if (r <= kt) ++hits;
    const double p = static_cast<double>(hits) / batch.r_M.size();
    std::lock_guard lock(g_cache_mutex);
    rmax_prob_cache().emplace(kt, p);
    return p;
}

// Piecewise kernel and its integral from the circumscribed-radius CDF series.
double series_f(double t) {
    if (t <= 0.0) return 0.0;
    if (t <= 0.5) {
        const double s = std::sin(kPi * t);
        return s * s;
    }
    return 1.0;
}

double series_f_integral(double u) {
    if (u <= 0.0) return 0.0;
    if (u <= 0.5) return 0.5 * u - std::sin(2.0 * kPi * u) / (4.0 * kPi);
    return u - 0.25;
}

// P[R_M <= r] at unit density via the k <= 3 truncated series; returns the
// magnitude of the last retained term for a convergence check.
double rmax_cdf_series(double r, double* last_term_scale) {
    const double x = 4.0 * kPi * r * r;
    QuadratureSpec axis;
    axis.abs_tol = 1e-12;
    axis.rel_tol = 1e-9;

    const double xi1 = series_f(1.0) * std::exp(x * series_f_integral(1.0));
    const double xi2 = integrate_1d(
        [&](double s) {
            return series_f(s) * series_f(1.0 - s) *
                   std::exp(x * (series_f_integral(s) +
                                 series_f_integral(1.0 - s)));
        },
        0.0, 1.0, axis);
    const double xi3 = integrate_1d(
        [&](double s) {
            const double outer = series_f(s) * std::exp(x * series_f_integral(s));
            if (1.0 - s <= 0.0) return 0.0;
            return outer *
                   integrate_1d(
                       [&](double t) {
                           const double rem = 1.0 - s - t;
                           return series_f(t) * series_f(rem) *
                                  std::exp(x * (series_f_integral(t) +
                                                series_f_integral(rem)));
                       },
                       0.0, 1.0 - s, axis);
        },
        0.0, 1.0, axis);

    const double t1 = -x * xi1;
    const double t2 = 0.5 * x * x * xi2;
    const double t3 = -x * x * x / 6.0 * xi3;
    if (last_term_scale) *last_term_scale = std::fabs(t3) * std::exp(-x);
    const double cdf = 1.0 - std::exp(-x) * (1.0 - (t1 + t2 + t3));
    return cdf;
}

}  // namespace

double prob_no_edge_region(double lambda0, double r_c, TailProbMethod method) {
    if (!(lambda0 > 0.0))
        throw std::domain_error("prob_no_edge_region: lambda0 must be > 0");
    if (r_c <= 0.0) return 0.0;
    const double kt = r_c * std::sqrt(lambda0);
    if (method == TailProbMethod::truncated_series) {
        double tail = 0.0;
        const double p = rmax_cdf_series(kt, &tail);
        if (tail < 2e-3 && p > -2e-3 && p <= 1.0)
            return std::clamp(p, 0.0, 1.0);
        std::fprintf(stderr,
                     "prob_no_edge_region: series not converged at "
                     "r_c*sqrt(lambda0)=%.4f (tail %.2e), falling back to "
                     "Monte Carlo\n",
                     kt, tail);
    }
    return prob_no_edge_region_mc(kt);
}

ConditionalMoments conditional_area_moments(RegionKind kind, double lambda0,
                                            double r_c) {
    ConditionalMoments out;
    if (kind == RegionKind::cell_center) {
        const double p = prob_disc_inside_cell(lambda0, r_c);  // atom mass
        const double pc = 1.0 - p;
        if (pc < 1e-12)
            throw DegenerateConditioningError(
                "cell-center area is almost surely the full disc");
        const AreaMoments m = cc_area_moments(lambda0, r_c);
        const double var = m.m2 - m.m1 * m.m1;
        const double atom = kPi * r_c * r_c;
        out.mean = (m.m1 - p * atom) / pc;
        out.variance = (var - p * pc * atom * atom - pc * p * out.mean * out.mean +
                        2.0 * atom * p * out.mean * pc) /
                       pc;
    } else {
        const double p = prob_no_edge_region(lambda0, r_c);  // atom at zero
        const double pc = 1.0 - p;
        if (pc < 1e-12)
            throw DegenerateConditioningError(
                "cell-edge region is almost surely empty");
        const AreaMoments m = ce_area_moments(lambda0, r_c);
        const double var = m.m2 - m.m1 * m.m1;
        out.mean = m.m1 / pc;
        out.variance = (var - p * pc * out.mean * out.mean) / pc;
    }
    out.variance = std::max(out.variance, 0.0);
    return out;
}

WeibullFit fit_weibull_moments(double mean, double variance) {
    if (!(mean > 0.0) || !(variance > 0.0))
        throw FitRangeError("fit_weibull_moments: need positive targets");
    const double cv2 = variance / (mean * mean);
    auto cv2_of_shape = [](double shape) {
        return std::exp(std::lgamma(1.0 + 2.0 / shape) -
                        2.0 * std::lgamma(1.0 + 1.0 / shape)) -
               1.0;
    };
    const double lo = 0.05, hi = 50.0;
    if ((cv2_of_shape(lo) - cv2) * (cv2_of_shape(hi) - cv2) > 0.0)
        throw FitRangeError(
            "fit_weibull_moments: no shape in [0.05, 50] matches the "
            "coefficient of variation");
    WeibullFit fit;
    fit.shape = find_root_monotone(
        [&](double shape) { return cv2_of_shape(shape) - cv2; }, lo, hi, 1e-13);
    fit.scale = mean * std::exp(-std::lgamma(1.0 + 1.0 / fit.shape));
    return fit;
}

WeibullFit fit_ce_weibull(double lambda0, double r_c) {
    const ConditionalMoments cm =
        conditional_area_moments(RegionKind::cell_edge, lambda0, r_c);
    if (!(cm.variance > 0.0))
        throw FitRangeError("fit_ce_weibull: conditional variance is zero");
    return fit_weibull_moments(cm.mean, cm.variance);
}

namespace {

// Normalization integral ratios of the truncated beta kernel
// x^(a-1) (z-x)^(b-1) on [0, w] with untruncated support [0, z]; tw = w/z.
double trunc_mean(double a, double b, double z, double tw) {
    const double num = regularized_incomplete_beta(tw, a + 1.0, b);
    const double den = regularized_incomplete_beta(tw, a, b);
    return z * (a / (a + b)) * num / den;
}

double trunc_second(double a, double b, double z, double tw) {
    const double num = regularized_incomplete_beta(tw, a + 2.0, b);
    const double den = regularized_incomplete_beta(tw, a, b);
    return z * z * (a * (a + 1.0)) / ((a + b) * (a + b + 1.0)) * num / den;
}

constexpr double kShapeLo = 0.01;
constexpr double kShapeHi = 200.0;

std::optional<double> solve_b_for_mean(double a, double z, double tw,
                                       double target_mean) {
    auto h = [&](double ln_b) { return trunc_mean(a, std::exp(ln_b), z, tw) - target_mean; };
    const double lo = std::log(kShapeLo), hi = std::log(kShapeHi);
    const double h_lo = h(lo), h_hi = h(hi);
    if (!std::isfinite(h_lo) || !std::isfinite(h_hi)) return std::nullopt;
    if ((h_lo > 0.0) == (h_hi > 0.0)) return std::nullopt;
    return std::exp(find_root_monotone(h, lo, hi, 1e-13));
}

}  // namespace

TruncatedBetaFit fit_truncated_beta_moments(double mean, double variance,
                                            double trunc_hi,
                                            double support_hi) {
    if (!(mean > 0.0) || !(variance > 0.0))
        throw FitRangeError("fit_truncated_beta_moments: need positive targets");
    const double z = support_hi;
    const double tw = trunc_hi / support_hi;

    auto variance_residual = [&](double a) -> std::optional<double> {
        auto b = solve_b_for_mean(a, z, tw, mean);
        if (!b) return std::nullopt;
        const double second = trunc_second(a, *b, z, tw);
        return second - mean * mean - variance;
    };

    // scan log(a) for a bracketing sign change, then refine
    const int n_scan = 121;
    double prev_a = 0.0;
    std::optional<double> prev_res;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    bool found = false;
    for (int i = 0; i < n_scan && !found; ++i) {
        const double a = std::exp(std::log(kShapeLo) +
                                  (std::log(kShapeHi) - std::log(kShapeLo)) *
                                      i / (n_scan - 1.0));
        const auto res = variance_residual(a);
        if (res && prev_res && (*res > 0.0) != (*prev_res > 0.0)) {
            bracket_lo = prev_a;
            bracket_hi = a;
            found = true;
        }
        if (res) {
            prev_a = a;
            prev_res = res;
        }
    }
    if (!found)
        throw FitRangeError(
            "fit_truncated_beta_moments: no shape pair in (0.01, 200] matches "
            "the target moments");

    const double ln_a = find_root_monotone(
        [&](double la) {
            const auto res = variance_residual(std::exp(la));
            return res ? *res : std::numeric_limits<double>::quiet_NaN();
        },
        std::log(bracket_lo), std::log(bracket_hi), 1e-13);
    TruncatedBetaFit fit;
    fit.a_shape = std::exp(ln_a);
    const auto b = solve_b_for_mean(fit.a_shape, z, tw, mean);
    if (!b)
        throw FitRangeError("fit_truncated_beta_moments: inner solve failed");
    fit.b_shape = *b;
    return fit;
}

TruncatedBetaFit fit_cc_truncated_beta(double lambda0, double r_c) {
    const ConditionalMoments cm =
        conditional_area_moments(RegionKind::cell_center, lambda0, r_c);
    if (!(cm.variance > 0.0))
        throw FitRangeError(
            "fit_cc_truncated_beta: conditional variance is zero");
    const double w = kPi * r_c * r_c;
    return fit_truncated_beta_moments(cm.mean, cm.variance, w, 1.5 * w);
}

// --- MixedAreaDistribution ---

double MixedAreaDistribution::pdf_conditional(double x) const {
    if (kind == RegionKind::cell_center) {
        if (x <= 0.0 || x >= trunc_hi) return 0.0;
        const double ln_norm =
            (a_shape + b_shape - 1.0) * std::log(support_hi) +
            log_beta(a_shape, b_shape) +
            std::log(regularized_incomplete_beta(trunc_hi / support_hi,
                                                 a_shape, b_shape));
        return std::exp((a_shape - 1.0) * std::log(x) +
                        (b_shape - 1.0) * std::log(support_hi - x) - ln_norm);
    }
    if (x <= 0.0) return 0.0;
    const double t = x / scale;
    return shape / scale * std::pow(t, shape - 1.0) *
           std::exp(-std::pow(t, shape));
}

double MixedAreaDistribution::cdf_conditional(double x) const {
    if (kind == RegionKind::cell_center) {
        if (x <= 0.0) return 0.0;
        if (x >= trunc_hi) return 1.0;
        return regularized_incomplete_beta(x / support_hi, a_shape, b_shape) /
               regularized_incomplete_beta(trunc_hi / support_hi, a_shape,
                                           b_shape);
    }
    if (x <= 0.0) return 0.0;
    return -std::expm1(-std::pow(x / scale, shape));
}

double MixedAreaDistribution::pdf_continuous(double x) const {
    return (1.0 - atom_mass) * pdf_conditional(x);
}

double MixedAreaDistribution::cdf(double x) const {
    if (kind == RegionKind::cell_center) {
        if (x >= atom_location) return 1.0;
        return (1.0 - atom_mass) * cdf_conditional(x);
    }
    if (x < 0.0) return 0.0;
    return atom_mass + (1.0 - atom_mass) * cdf_conditional(x);
}

double MixedAreaDistribution::quantile(double p) const {
    p = std::clamp(p, 0.0, 1.0);
    if (kind == RegionKind::cell_center) {
        if (p >= 1.0 - atom_mass) return atom_location;
        const double target = p / (1.0 - atom_mass);
        return find_root_monotone(
            [&](double x) { return cdf_conditional(x) - target; }, 0.0,
            trunc_hi, 1e-12 * trunc_hi);
    }
    if (p <= atom_mass) return 0.0;
    const double target = (p - atom_mass) / (1.0 - atom_mass);
    return scale * std::pow(-std::log1p(-target), 1.0 / shape);
}

double MixedAreaDistribution::sample(RngStream& rng) const {
    return quantile(rng.uniform());
}

MixedAreaDistribution build_area_distribution(RegionKind kind, double lambda0,
                                              double r_c,
                                              TailProbMethod method) {
    MixedAreaDistribution dist;
    dist.kind = kind;
    dist.lambda0 = lambda0;
    dist.r_c = r_c;
    const ConditionalMoments cm =
        conditional_area_moments(kind, lambda0, r_c);
    dist.continuous_mean = cm.mean;
    if (kind == RegionKind::cell_center) {
        dist.atom_location = kPi * r_c * r_c;
        dist.atom_mass = prob_disc_inside_cell(lambda0, r_c);
        const TruncatedBetaFit fit = fit_cc_truncated_beta(lambda0, r_c);
        dist.a_shape = fit.a_shape;
        dist.b_shape = fit.b_shape;
        dist.trunc_hi = dist.atom_location;
        dist.support_hi = 1.5 * dist.atom_location;
    } else {
        dist.atom_location = 0.0;
        dist.atom_mass = prob_no_edge_region(lambda0, r_c, method);
        const WeibullFit fit = fit_ce_weibull(lambda0, r_c);
        dist.shape = fit.shape;
        dist.scale = fit.scale;
    }
    return dist;
}

InverseMomentResult inverse_area_moment(const MixedAreaDistribution& dist,
                                        bool condition_on_continuous) {
    if (dist.kind == RegionKind::cell_edge && !condition_on_continuous)
        throw std::domain_error(
            "inverse_area_moment: undefined with an atom at zero; condition "
            "on the continuous part");
    if (dist.atom_mass >= 1.0 - 1e-15 && !condition_on_continuous)
        return {1.0 / dist.atom_location, false};

    const double upper =
        dist.kind == RegionKind::cell_center
            ? dist.trunc_hi
            : dist.scale * std::pow(std::log(1e16), 1.0 / dist.shape);
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-9;
    auto tail_integral = [&](double x_min) {
        // substitute x = e^t so that x^-1 f(x) dx = f(e^t) dt
        return integrate_1d(
            [&](double t) { return dist.pdf_conditional(std::exp(t)); },
            std::log(x_min), std::log(upper), spec);
    };
    const double x_min = 1e-6 * dist.continuous_mean;
    const double base = tail_integral(x_min);
    const double refined = tail_integral(0.5 * x_min);
    InverseMomentResult out;
    out.cutoff_sensitive =
        std::fabs(refined - base) > 0.01 * std::fabs(refined);
    out.value = base;
    if (!condition_on_continuous) {
        // cell-center: include the atom's contribution
        out.value = (1.0 - dist.atom_mass) * base +
                    dist.atom_mass / dist.atom_location;
    }
    return out;
}

}  // namespace pilotgeom
