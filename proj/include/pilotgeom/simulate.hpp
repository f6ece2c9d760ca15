#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pilotgeom/coverage.hpp"

namespace pilotgeom {

enum class PilotMode { fpr, reuse1 };

/// How interfering cells pick their cell-edge pilot pool: an independent
/// uniform group per cell, or one pool shared by every cell.
enum class CeGroupMode { random_group, same_set };

struct SimOptions {
    PilotMode mode = PilotMode::fpr;
    CeGroupMode ce_group_mode = CeGroupMode::random_group;
    double window_factor = 8.0;  // half-width in units of 1/sqrt(lambda0)
    double guard_factor = 3.0;
    /// Place a BS at the window center so the tagged cell is the typical cell.
    bool condition_origin_bs = true;
};

struct UserRecord {
    Vec2 pos;
    int cell = -1;
    RegionKind kind = RegionKind::cell_center;
    int pilot = -1;  // -1 when unassigned
};

struct Realization {
    PointPattern bs;
    std::vector<CellGeometry> cells;  // aligned with bs.points
    std::vector<char> interior;
    int tagged = -1;
    std::vector<UserRecord> users;
    std::vector<int> ce_group;  // group index per cell, -1 without edge region
    std::vector<std::vector<int>> users_by_pilot;
    std::uint64_t seed = 0, stream_id = 0;
};

Realization run_realization(const NetworkConfig& cfg, const SimOptions& opts,
                            RngStream& rng);

/// Asymptotic SINR of the tagged cell's user on the given pilot: serving
/// pathloss over the sum of same-pilot pathlosses from other cells.
/// Returns nothing when the pilot is unused in the tagged cell; +infinity
/// when no other cell uses it.
std::optional<double> tagged_sinr(const Realization& real, RegionKind kind,
                                  int pilot, double alpha);

struct Curve {
    std::vector<double> x, y, se;
    std::vector<long> n;
    bool operator==(const Curve&) const = default;
};

struct SimulationSummary {
    std::uint64_t seed = 0;
    int realizations = 0;
    PilotMode mode = PilotMode::fpr;
    std::map<std::string, Curve> curves;
    std::map<std::string, double> scalars;
    bool operator==(const SimulationSummary&) const = default;
};

/// Monte Carlo sweep over independent realizations (stream_id = realization
/// index); per-curve aggregation is an ordered reduction so results do not
/// depend on the worker count. Thread count capped by PILOTGEOM_THREADS.
SimulationSummary run_experiment(const NetworkConfig& cfg,
                                 const SimOptions& opts,
                                 const std::vector<double>& thresholds_db,
                                 int n_realizations, std::uint64_t seed);

}  // namespace pilotgeom
