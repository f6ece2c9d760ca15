#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "pilotgeom/cli.hpp"

using namespace pilotgeom;

int main(int argc, char** argv) {
    CLI::App app{"Uplink massive-MIMO fractional pilot reuse analysis and "
                 "Monte Carlo validation"};
    app.require_subcommand(1);

    std::string config_path, out_dir, mode;
    int realizations = -1;
    long long seed = -1;
    bool quick = false;

    for (const char* name :
         {"areas", "pcf", "coverage", "se", "simulate", "validate", "sweep"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "base RNG seed");
        sub->add_option("--realizations", realizations,
                        "Monte Carlo budget (realizations, cells, or patterns "
                        "depending on the command)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--mode", mode, "pilot mode: fpr or reuse1");
        if (std::string(name) == "validate")
            sub->add_flag("--quick", quick,
                          "reduced Monte Carlo budgets (smoke run)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentSpec spec = config_path.empty()
                                  ? parse_config_text("")
                                  : parse_config_file(config_path);
        spec.command = command_from_name(app.get_subcommands().front()->get_name());
        if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);
        if (realizations >= 0) spec.realizations = realizations;
        if (!out_dir.empty()) spec.out_dir = out_dir;
        if (!mode.empty()) {
            if (mode == "fpr")
                spec.sim.mode = PilotMode::fpr;
            else if (mode == "reuse1")
                spec.sim.mode = PilotMode::reuse1;
            else
                throw ConfigError("--mode must be 'fpr' or 'reuse1'");
        }
        if (quick) spec.quick = true;
        return cli::run(spec);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
