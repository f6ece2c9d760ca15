#include "pilotgeom/pilots.hpp"

#include <cmath>

namespace pilotgeom {

double zero_truncated_poisson_pmf(int n, double mu) {
    if (!(mu > 0.0))
        throw std::domain_error("zero_truncated_poisson_pmf: mu must be > 0");
    if (n <= 0) return 0.0;
    const double log_norm = std::log(-std::expm1(-mu));
    return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0) - log_norm);
}

namespace {

int series_cap(double mu) {
    return static_cast<int>(std::ceil(mu + 10.0 * std::sqrt(mu) + 20.0));
}

// P[user holds a pilot | n pool pilots, load mu] summed over the truncated
// Poisson law: full assignment for N <= pool, share pool/N beyond.
double assignment_kernel(double mu, int pool) {
    if (pool <= 0) return 0.0;
    const int n_max = series_cap(mu);
    const double log_norm = std::log(-std::expm1(-mu));
    double acc = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double p = std::exp(-mu + n * std::log(mu) -
                                  std::lgamma(n + 1.0) - log_norm);
        acc += n <= pool ? p : p * pool / n;
    }
    return acc;
}

// P[a fixed pilot of the pool is in use | load mu] = E[min(N, pool)] / pool.
double utilization_kernel(double mu, int pool) {
    if (pool <= 0) return 0.0;
    const int n_max = series_cap(mu);
    const double log_norm = std::log(-std::expm1(-mu));
    double acc = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double p = std::exp(-mu + n * std::log(mu) -
                                  std::lgamma(n + 1.0) - log_norm);
        acc += n <= pool ? p * n / pool : p;
    }
    return acc;
}

// Expectation of kernel(lambda_u * x, pool) over the area law. The atom is
// handled analytically; the continuous component is integrated with the
// normalized density. Cell-edge is conditioned on the edge region, so only
// its continuous (Weibull) part enters.
template <typename Kernel>
double average_over_area(RegionKind kind, const LoadModel& load, int pool,
                         Kernel&& kernel) {
    const MixedAreaDistribution& dist =
        kind == RegionKind::cell_center ? *load.cc_area : *load.ce_area;
    QuadratureSpec spec;
    spec.abs_tol = 1e-10;
    spec.rel_tol = 1e-8;
    double upper, atom_part = 0.0, atom_mass = 0.0;
    if (kind == RegionKind::cell_center) {
        upper = dist.trunc_hi;
        atom_mass = dist.atom_mass;
        atom_part = atom_mass * kernel(load.lambda_u * dist.atom_location, pool);
    } else {
        upper = dist.scale * std::pow(std::log(1e16), 1.0 / dist.shape);
    }
    const double cont = integrate_1d(
        [&](double x) {
            return kernel(load.lambda_u * x, pool) * dist.pdf_conditional(x);
        },
        0.0, upper, spec);
    if (kind == RegionKind::cell_center)
        return atom_part + (1.0 - atom_mass) * cont;
    return cont;
}

}  // namespace

AssignmentProbability pilot_assignment_probability(RegionKind kind,
                                                   const PilotPlan& plan,
                                                   const LoadModel& load) {
    const int pool =
        kind == RegionKind::cell_center ? plan.cc_count : plan.ce_count;
    AssignmentProbability out;
    if (pool <= 0) return out;
    if (!(load.lambda_u > 0.0))
        throw std::domain_error("pilot_assignment_probability: lambda_u <= 0");
    out.any_pilot = average_over_area(kind, load, pool, assignment_kernel);
    out.per_pilot = out.any_pilot / pool;
    return out;
}

double pilot_utilization_probability(RegionKind kind, const PilotPlan& plan,
                                     const LoadModel& load) {
    const int pool =
        kind == RegionKind::cell_center ? plan.cc_count : plan.ce_count;
    if (pool <= 0) return 0.0;
    if (!(load.lambda_u > 0.0))
        throw std::domain_error("pilot_utilization_probability: lambda_u <= 0");
    return average_over_area(kind, load, pool, utilization_kernel);
}

}  // namespace pilotgeom
