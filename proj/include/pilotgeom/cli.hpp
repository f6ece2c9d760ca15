#pragma once

#include <string>
#include <vector>

#include "pilotgeom/config.hpp"
#include "pilotgeom/validation.hpp"

namespace pilotgeom::cli {

inline constexpr const char* kVersion = "pilotgeom 0.1.0";

/// Locale-independent formatting with 9 significant digits.
std::string format_double(double v);

/// CSV with '#' header rows carrying the config echo, seed, and version.
void write_csv(const std::string& path, const nlohmann::json& config_echo,
               std::uint64_t seed, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

/// Byte-identity of repeated sweep and simulate runs with the same seed.
std::vector<validation::CriterionResult> determinism_check(
    const ExperimentSpec& spec);

/// Execute one experiment spec; returns the process exit status.
int run(const ExperimentSpec& spec);

}  // namespace pilotgeom::cli
