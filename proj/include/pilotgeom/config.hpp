#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pilotgeom/simulate.hpp"

namespace pilotgeom {

enum class Command { areas, pcf, coverage, se, simulate, validate, sweep };

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    std::string axis;  // "kappa" | "bc_over_b" | "lambda_u_factor"
    std::vector<double> grid;
};

/// One fully resolved experiment: model parameters, simulator options,
/// orchestration knobs, and the normalized config echo embedded in outputs.
struct ExperimentSpec {
    Command command = Command::validate;
    NetworkConfig network;
    SimOptions sim;
    std::vector<double> thresholds_db = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0};
    std::optional<SweepSpec> sweep;
    int realizations = 0;  // 0: per-command default
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool quick = false;
    nlohmann::json echo;
};

/// Parse a JSON config document. Unknown keys are rejected; an empty document
/// yields the baseline defaults. kappa and r_c may both be given only when
/// they agree to 1e-9 relative.
ExperimentSpec parse_config_json(const nlohmann::json& j);
ExperimentSpec parse_config_file(const std::string& path);
ExperimentSpec parse_config_text(const std::string& text);

const char* command_name(Command c);
Command command_from_name(const std::string& name);

}  // namespace pilotgeom
