#pragma once

#include <memory>

#include "pilotgeom/interference.hpp"

namespace pilotgeom {

/// Truncated Rayleigh serving-distance law: cell-center on [0, r_c],
/// cell-edge on (r_c, infinity).
struct ServingDistanceLaw {
    RegionKind kind = RegionKind::cell_center;
    double lambda0 = 0.0, c2 = 0.0, r_c = 0.0;

    double cdf(double d) const;
    double pdf(double d) const;
    double quantile(double p) const;
    /// Quadrature upper limit where the density envelope falls below 1e-14.
    double upper_limit() const;
};

ServingDistanceLaw serving_distance(RegionKind kind, const NetworkConfig& cfg);

/// Cached analytical state for one configuration: fitted area laws, pilot
/// probabilities, interferer fields, dominant-interferer laws, and the
/// coverage / spectral-efficiency evaluations built on them.
class AnalyticalModel {
public:
    static AnalyticalModel build(const NetworkConfig& cfg);

    const NetworkConfig& config() const { return cfg_; }
    double p_has_edge() const { return p_has_edge_; }
    const MixedAreaDistribution& area_law(RegionKind kind) const {
        return kind == RegionKind::cell_center ? cc_area_ : ce_area_;
    }
    AssignmentProbability assignment(RegionKind kind) const {
        return kind == RegionKind::cell_center ? assign_cc_ : assign_ce_;
    }
    double utilization(RegionKind kind) const {
        return kind == RegionKind::cell_center ? util_cc_ : util_ce_;
    }
    const RadialDensityModel& interferer_field(RegionKind kind) const {
        return kind == RegionKind::cell_center ? *cc_field_ : *ce_field_;
    }
    double residual_interference(RegionKind kind, double d_hat) const {
        return kind == RegionKind::cell_center ? (*cc_resid_)(d_hat)
                                               : (*ce_resid_)(d_hat);
    }
    const ServingDistanceLaw& serving_law(RegionKind kind) const {
        return kind == RegionKind::cell_center ? serving_cc_ : serving_ce_;
    }

    /// P[SINR >= threshold | pilot in use] via the dominant-interferer
    /// approximation (cell-edge additionally conditioned on the edge region).
    double coverage(RegionKind kind, double threshold) const;

    /// Int_0^inf P_c(2^t - 1) dt, truncated at 40 bits or once P_c < 1e-6.
    double se_threshold_integral(RegionKind kind) const;

    /// Average spectral efficiency of a randomly selected user, including the
    /// (1 - B/T_c) training overhead factor.
    double avg_user_se(RegionKind kind) const;

    /// Average cell spectral efficiency.
    double avg_cell_se() const;

private:
    NetworkConfig cfg_;
    MixedAreaDistribution cc_area_, ce_area_;
    double p_has_edge_ = 0.0;
    AssignmentProbability assign_cc_, assign_ce_;
    double util_cc_ = 0.0, util_ce_ = 0.0;
    InverseMomentResult inv_moment_unit_;
    std::shared_ptr<RadialDensityModel> cc_field_, ce_field_;
    std::shared_ptr<ResidualInterferenceTable> cc_resid_, ce_resid_;
    ServingDistanceLaw serving_cc_, serving_ce_;
};

}  // namespace pilotgeom
