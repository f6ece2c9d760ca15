#pragma once

#include <stdexcept>

#include "pilotgeom/area_models.hpp"

namespace pilotgeom {

/// Partition of the B orthogonal pilots into a cell-center pool reused in
/// every cell and per-cell cell-edge pools of size ce_count drawn from the
/// remaining pilots with reuse factor reuse_factor.
struct PilotPlan {
    int total = 100;             // B
    int cc_count = 58;           // B_C
    int ce_count = 14;           // B_E
    int reuse_factor = 3;        // beta_f
    int coherence_symbols = 200; // T_c

    void validate() const {
        if (total < 0 || cc_count < 0 || ce_count < 0)
            throw std::invalid_argument("pilot counts must be nonnegative");
        if (reuse_factor < 1)
            throw std::invalid_argument("reuse_factor must be >= 1");
        if (cc_count + reuse_factor * ce_count != total)
            throw std::invalid_argument(
                "pilot partition violated: cc_count + reuse_factor * ce_count "
                "must equal total");
        if (total > coherence_symbols)
            throw std::invalid_argument(
                "total pilots cannot exceed the coherence block");
    }
};

/// Zero-truncated Poisson pmf: 0 at n = 0, else exp(-mu) mu^n / (n! (1-e^-mu)).
double zero_truncated_poisson_pmf(int n, double mu);

/// Per-cell user load: intensity together with the fitted area laws.
struct LoadModel {
    double lambda_u = 0.0;
    const MixedAreaDistribution* cc_area = nullptr;
    const MixedAreaDistribution* ce_area = nullptr;
};

struct AssignmentProbability {
    double any_pilot = 0.0;
    double per_pilot = 0.0;
};

/// Probability that a randomly selected user of the given class holds a pilot
/// (and the equiprobable per-pilot share). Cell-edge values are conditioned
/// on the cell having an edge region.
AssignmentProbability pilot_assignment_probability(RegionKind kind,
                                                   const PilotPlan& plan,
                                                   const LoadModel& load);

/// Probability that a fixed pilot of the given class is in use in a cell
/// (cell-edge conditioned on the edge region existing).
double pilot_utilization_probability(RegionKind kind, const PilotPlan& plan,
                                     const LoadModel& load);

}  // namespace pilotgeom
