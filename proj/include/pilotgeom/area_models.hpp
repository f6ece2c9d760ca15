#pragma once

#include <stdexcept>
#include <vector>

#include "pilotgeom/geometry.hpp"
#include "pilotgeom/numerics.hpp"

namespace pilotgeom {

struct AreaMoments {
    double m1 = 0.0;  // mean area
    double m2 = 0.0;  // second moment
};

/// Moments of the cell-center area of a typical cell: mean in closed form,
/// second moment via the two-circle-union triple integral.
AreaMoments cc_area_moments(double lambda0, double r_c);
AreaMoments ce_area_moments(double lambda0, double r_c);

/// P[the disc of radius r_c lies inside the cell] = exp(-4 pi lambda0 r_c^2);
/// this is the mass of the cell-center area atom at pi r_c^2.
double prob_disc_inside_cell(double lambda0, double r_c);

enum class TailProbMethod { monte_carlo, truncated_series };

/// P[the cell has no cell-edge region] = P[R_M <= r_c].
/// monte_carlo (default) measures interior cells at unit scale and caches per
/// r_c*sqrt(lambda0); truncated_series evaluates the circumscribed-radius CDF
/// series up to k = 3 and falls back to Monte Carlo (with a warning on
/// stderr) when the last retained term is not negligible.
double prob_no_edge_region(double lambda0, double r_c,
                           TailProbMethod method = TailProbMethod::monte_carlo);

struct ConditionalMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean/variance of the region area conditioned on it being non-degenerate
/// (cell-center: disc not fully inside; cell-edge: edge region exists).
ConditionalMoments conditional_area_moments(RegionKind kind, double lambda0,
                                            double r_c);

class FitRangeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class DegenerateConditioningError : public std::domain_error {
    using std::domain_error::domain_error;
};

struct WeibullFit {
    double shape = 0.0;
    double scale = 0.0;
};
/// Weibull parameters matching the given first two moments.
WeibullFit fit_weibull_moments(double mean, double variance);
WeibullFit fit_ce_weibull(double lambda0, double r_c);

struct TruncatedBetaFit {
    double a_shape = 0.0;
    double b_shape = 0.0;
};
/// Shape parameters of the beta kernel on [0, support_hi] truncated to
/// [0, trunc_hi] matching the given first two moments.
TruncatedBetaFit fit_truncated_beta_moments(double mean, double variance,
                                            double trunc_hi, double support_hi);
TruncatedBetaFit fit_cc_truncated_beta(double lambda0, double r_c);

/// Atom + continuous mixture for the cell-center or cell-edge area law.
/// Cell-center: atom at pi r_c^2 plus a truncated beta on [0, pi r_c^2] whose
/// untruncated support is [0, 1.5 pi r_c^2]. Cell-edge: atom at 0 plus a
/// Weibull.
struct MixedAreaDistribution {
    RegionKind kind = RegionKind::cell_center;
    double lambda0 = 0.0;
    double r_c = 0.0;
    double atom_location = 0.0;
    double atom_mass = 0.0;
    double continuous_mean = 0.0;  // conditional mean matched by the fit

    // truncated beta continuous part (cell-center)
    double a_shape = 0.0, b_shape = 0.0;
    double trunc_hi = 0.0, support_hi = 0.0;
    // Weibull continuous part (cell-edge)
    double shape = 0.0, scale = 0.0;

    /// Continuous component scaled by (1 - atom_mass).
    double pdf_continuous(double x) const;
    /// Full mixed CDF including the atom.
    double cdf(double x) const;
    double quantile(double p) const;
    double sample(RngStream& rng) const;
    /// Normalized continuous density (integrates to one over its support).
    double pdf_conditional(double x) const;
    double cdf_conditional(double x) const;
};

MixedAreaDistribution build_area_distribution(
    RegionKind kind, double lambda0, double r_c,
    TailProbMethod method = TailProbMethod::monte_carlo);

struct InverseMomentResult {
    double value = 0.0;
    /// Set when halving the lower cutoff moves the value by more than 1%.
    bool cutoff_sensitive = false;
};

/// E[X^-1] under the mixed law (or its continuous part when
/// condition_on_continuous), with lower cutoff 1e-6 * continuous mean.
InverseMomentResult inverse_area_moment(const MixedAreaDistribution& dist,
                                        bool condition_on_continuous);

/// Interior-cell harvest used by the Monte Carlo oracles: areas and
/// characteristic radii of at least n_target interior cells.
struct CellSampleBatch {
    std::vector<double> cc_areas;
    std::vector<double> ce_areas;
    std::vector<double> r_m;
    std::vector<double> r_M;
};
CellSampleBatch harvest_interior_cells(double lambda0, double r_c,
                                       long n_target, RngStream stream,
                                       double window_factor = 8.0,
                                       double guard_factor = 3.0);

}  // namespace pilotgeom
