#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pilotgeom/simulate.hpp"
#include "pilotgeom/spatial_stats.hpp"

namespace pilotgeom::validation {

struct CriterionResult {
    std::string id;
    std::string description;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct Options {
    std::uint64_t seed = 1;
    long table1_cells = 100000;
    long moment_cells = 60000;
    int coverage_realizations = 2500;
    int pcf_patterns = 6000;
    int se_realizations = 2000;
    long oracle_draws = 200000;
};

/// Reduced budgets for smoke runs; metric bounds are unchanged, so some
/// checks may legitimately fail at this scale.
Options quick_options();

/// Fitted-vs-empirical distances for the area laws at the benchmark radii.
struct Table1Row {
    double r_c = 0.0;
    double ks_cc = 0.0, kl_cc = 0.0;
    bool has_ce = false;
    double ks_ce = 0.0, kl_ce = 0.0;
};
std::vector<Table1Row> table1_rows(const Options& opts);

std::vector<CriterionResult> criterion_table1(const std::vector<Table1Row>&);
std::vector<CriterionResult> criterion_moments(const Options& opts);
std::vector<CriterionResult> criterion_coverage(const Options& opts);
std::vector<CriterionResult> criterion_pcf(const Options& opts);
std::vector<CriterionResult> criterion_trends(const Options& opts);
std::vector<CriterionResult> criterion_oracle(const Options& opts);

/// Criteria 1-6; the determinism check lives with the CLI writers.
std::vector<CriterionResult> run_all(const Options& opts);

/// The benchmark configuration used for the coverage and oracle checks.
NetworkConfig benchmark_config();
SimOptions benchmark_sim_options();

}  // namespace pilotgeom::validation
