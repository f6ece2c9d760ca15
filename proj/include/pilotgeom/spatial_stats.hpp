#pragma once

#include <vector>

#include "pilotgeom/area_models.hpp"

namespace pilotgeom {

/// Empirical pair correlation from point patterns observed around the tagged
/// BS: mean annulus counts over realizations divided by the process density
/// and annulus area (the finite difference of Ripley's K over 2 pi r dr).
struct PcfEstimate {
    std::vector<double> bin_lo, bin_hi;
    std::vector<double> value, se;
    std::vector<long> counts;  // raw point counts per bin
};

PcfEstimate estimate_pcf(const std::vector<std::vector<Vec2>>& patterns,
                         double process_density,
                         const std::vector<double>& bin_edges);

/// One interfering point per cell (cell-center or cell-edge region) around an
/// origin-conditioned BS at unit density; positions are relative to the
/// origin. Cells-with-edge tallies feed the process-density estimate.
std::vector<Vec2> sample_interferer_pattern(RegionKind kind, double kappa,
                                            double c2, double window_factor,
                                            RngStream& rng,
                                            long* cells_seen = nullptr,
                                            long* cells_with_edge = nullptr);

struct PrototypeFit {
    double a = 0.0, b = 0.0, c = 0.0;
    double residual = 0.0;  // sum of squared errors
    bool converged = false;
};

/// Least squares fit of 1 - exp(-a s) + b s exp(-c s) with s = r^2 - r_c^2
/// against an empirical pair correlation sampled at radii r > r_c.
PrototypeFit fit_pcf_prototype(const std::vector<double>& r,
                               const std::vector<double>& g, double r_c);

struct KsKlResult {
    double ks = 0.0;
    double kl = 0.0;  // natural-log divergence over 100 equal-width bins
};

/// Goodness of fit of the mixed area law against empirical samples. The atom
/// is compared as its own bin; the continuous part uses 100 equal-width bins.
KsKlResult ks_kl(std::vector<double> samples,
                 const MixedAreaDistribution& model);

}  // namespace pilotgeom
