#pragma once

#include <cmath>
#include <optional>

#include "pilotgeom/pilots.hpp"

namespace pilotgeom {

/// Scalar model parameters shared by the analytical and simulation engines.
struct NetworkConfig {
    double lambda0 = 4e-6;          // BS density, per m^2
    double lambda_u = 150 * 4e-6;   // user intensity, per m^2
    double alpha = 3.7;             // pathloss exponent
    double c2 = 1.25;               // serving-distance correction factor
    double kappa = 0.6;             // normalized threshold radius
    PilotPlan plan;
    /// Probability that an interfering cell's edge pool contains the tagged
    /// edge pilot (1 when every cell shares one pool, 1/reuse_factor under
    /// independent random pool coloring).
    double group_inclusion = 1.0;
    std::optional<double> utilization_override_cc;
    std::optional<double> utilization_override_ce;

    double r_c() const { return kappa / std::sqrt(kPi * c2 * lambda0); }
    double kappa_from_r_c(double rc) const {
        return rc * std::sqrt(kPi * c2 * lambda0);
    }
    void validate() const;
};

/// Pilot-partition rule: reserve about 1 - exp(-kappa^2) of the pilots for
/// cell-center users.
double cc_pilot_fraction_rule(double kappa);

/// Feasible plan nearest the fraction rule, keeping (total - cc) divisible by
/// the reuse factor.
PilotPlan plan_from_rule(int total, int reuse_factor, double kappa,
                         int coherence_symbols);

}  // namespace pilotgeom
