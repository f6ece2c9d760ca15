#include "pilotgeom/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pilotgeom {

void NetworkConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& constraint) {
        throw std::invalid_argument("config field '" + field + "': " +
                                    constraint);
    };
    if (!(lambda0 > 0.0)) fail("lambda0", "must be > 0");
    if (!(lambda_u > 0.0)) fail("lambda_u", "must be > 0");
    if (!(alpha > 1.0)) fail("alpha", "must be > 1 so that 2*alpha > 2");
    if (!(c2 > 0.0)) fail("c2", "must be > 0");
    if (!(kappa >= 0.0)) fail("kappa", "must be >= 0");
    if (group_inclusion < 0.0 || group_inclusion > 1.0)
        fail("group_inclusion", "must be in [0, 1]");
    for (const auto& ov : {utilization_override_cc, utilization_override_ce})
        if (ov && (*ov < 0.0 || *ov > 1.0))
            fail("utilization_override", "must be in [0, 1]");
    plan.validate();
}

double cc_pilot_fraction_rule(double kappa) {
    return -std::expm1(-kappa * kappa);
}

PilotPlan plan_from_rule(int total, int reuse_factor, double kappa,
                         int coherence_symbols) {
    const double target = cc_pilot_fraction_rule(kappa) * total;
    PilotPlan best;
    best.total = total;
    best.reuse_factor = reuse_factor;
    best.coherence_symbols = coherence_symbols;
    double best_gap = -1.0;
    for (int cc = 0; cc <= total; ++cc) {
        if ((total - cc) % reuse_factor != 0) continue;
        const double gap = std::fabs(cc - target);
        if (best_gap < 0.0 || gap < best_gap) {
            best_gap = gap;
            best.cc_count = cc;
            best.ce_count = (total - cc) / reuse_factor;
        }
    }
    best.validate();
    return best;
}

}  // namespace pilotgeom
