#include "pilotgeom/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pilotgeom {

namespace {

void reject_unknown_keys(const nlohmann::json& j,
                         const std::set<std::string>& allowed,
                         const std::string& scope) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown config key '" + scope + item.key() +
                              "'");
}

double require_number(const nlohmann::json& j, const std::string& key,
                      double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw ConfigError("config field '" + key + "': must be a number");
    return j[key].get<double>();
}

int require_int(const nlohmann::json& j, const std::string& key,
                int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer())
        throw ConfigError("config field '" + key + "': must be an integer");
    return j[key].get<int>();
}

}  // namespace

ExperimentSpec parse_config_json(const nlohmann::json& j) {
    if (!j.is_object() && !j.is_null())
        throw ConfigError("config root must be a JSON object");
    ExperimentSpec spec;
    NetworkConfig& net = spec.network;

    const std::set<std::string> top_keys = {
        "lambda0",       "lambda_u",       "lambda_u_factor",
        "alpha",         "c2",             "kappa",
        "r_c",           "pilots",         "ce_group_mode",
        "group_inclusion", "utilization_override", "window_factor",
        "guard_factor",  "condition_origin_bs",   "mode",
        "thresholds_db", "realizations",   "seed",
        "out_dir",       "sweep",          "quick"};
    if (j.is_object()) reject_unknown_keys(j, top_keys, "");
    const nlohmann::json obj = j.is_object() ? j : nlohmann::json::object();

    net.lambda0 = require_number(obj, "lambda0", 4e-6);
    if (!(net.lambda0 > 0.0))
        throw ConfigError("config field 'lambda0': must be > 0");
    if (obj.contains("lambda_u") && obj.contains("lambda_u_factor"))
        throw ConfigError(
            "config fields 'lambda_u' and 'lambda_u_factor' are mutually "
            "exclusive");
    if (obj.contains("lambda_u"))
        net.lambda_u = require_number(obj, "lambda_u", 0.0);
    else
        net.lambda_u =
            require_number(obj, "lambda_u_factor", 150.0) * net.lambda0;
    net.alpha = require_number(obj, "alpha", 3.7);
    net.c2 = require_number(obj, "c2", 1.25);
    if (!(net.c2 > 0.0)) throw ConfigError("config field 'c2': must be > 0");

    const bool has_kappa = obj.contains("kappa");
    const bool has_rc = obj.contains("r_c");
    if (has_kappa) net.kappa = require_number(obj, "kappa", 0.6);
    if (has_rc) {
        const double rc = require_number(obj, "r_c", 0.0);
        if (!(rc >= 0.0))
            throw ConfigError("config field 'r_c': must be >= 0");
        const double kappa_from_rc = net.kappa_from_r_c(rc);
        if (has_kappa) {
            if (std::fabs(net.r_c() - rc) > 1e-9 * std::max(1.0, rc))
                throw ConfigError(
                    "config fields 'kappa' and 'r_c' disagree: r_c must equal "
                    "kappa / sqrt(pi c2 lambda0) to 1e-9 relative");
        } else {
            net.kappa = kappa_from_rc;
        }
    }
    if (!has_kappa && !has_rc) net.kappa = 0.6;

    if (obj.contains("pilots")) {
        const nlohmann::json& p = obj["pilots"];
        if (!p.is_object())
            throw ConfigError("config field 'pilots': must be an object");
        reject_unknown_keys(
            p, {"total", "cc", "ce", "reuse_factor", "coherence"}, "pilots.");
        net.plan.total = require_int(p, "total", 100);
        net.plan.cc_count = require_int(p, "cc", 58);
        net.plan.ce_count = require_int(p, "ce", 14);
        net.plan.reuse_factor = require_int(p, "reuse_factor", 3);
        net.plan.coherence_symbols = require_int(p, "coherence", 200);
    }

    if (obj.contains("ce_group_mode")) {
        const std::string mode = obj["ce_group_mode"].get<std::string>();
        if (mode == "random")
            spec.sim.ce_group_mode = CeGroupMode::random_group;
        else if (mode == "same_set")
            spec.sim.ce_group_mode = CeGroupMode::same_set;
        else
            throw ConfigError(
                "config field 'ce_group_mode': must be 'random' or "
                "'same_set'");
    }
    if (obj.contains("group_inclusion")) {
        net.group_inclusion = require_number(obj, "group_inclusion", 1.0);
    } else {
        // pair the analytical thinning with the simulator's pool coloring
        net.group_inclusion =
            spec.sim.ce_group_mode == CeGroupMode::random_group
                ? 1.0 / net.plan.reuse_factor
                : 1.0;
    }

    if (obj.contains("utilization_override")) {
        const nlohmann::json& u = obj["utilization_override"];
        if (!u.is_object())
            throw ConfigError(
                "config field 'utilization_override': must be an object");
        reject_unknown_keys(u, {"cc", "ce"}, "utilization_override.");
        if (u.contains("cc"))
            net.utilization_override_cc = u["cc"].get<double>();
        if (u.contains("ce"))
            net.utilization_override_ce = u["ce"].get<double>();
    }

    spec.sim.window_factor = require_number(obj, "window_factor", 8.0);
    spec.sim.guard_factor = require_number(obj, "guard_factor", 3.0);
    if (!(spec.sim.window_factor > spec.sim.guard_factor) ||
        spec.sim.guard_factor < 0.0)
        throw ConfigError(
            "config fields 'window_factor'/'guard_factor': need window_factor "
            "> guard_factor >= 0");
    if (obj.contains("condition_origin_bs"))
        spec.sim.condition_origin_bs = obj["condition_origin_bs"].get<bool>();
    if (obj.contains("mode")) {
        const std::string mode = obj["mode"].get<std::string>();
        if (mode == "fpr")
            spec.sim.mode = PilotMode::fpr;
        else if (mode == "reuse1")
            spec.sim.mode = PilotMode::reuse1;
        else
            throw ConfigError("config field 'mode': must be 'fpr' or 'reuse1'");
    }

    if (obj.contains("thresholds_db")) {
        spec.thresholds_db = obj["thresholds_db"].get<std::vector<double>>();
        if (spec.thresholds_db.empty())
            throw ConfigError("config field 'thresholds_db': must be nonempty");
    }
    spec.realizations = require_int(obj, "realizations", 0);
    if (spec.realizations < 0)
        throw ConfigError("config field 'realizations': must be >= 0");
    if (obj.contains("seed")) spec.seed = obj["seed"].get<std::uint64_t>();
    if (obj.contains("out_dir")) spec.out_dir = obj["out_dir"].get<std::string>();
    if (obj.contains("quick")) spec.quick = obj["quick"].get<bool>();

    if (obj.contains("sweep")) {
        const nlohmann::json& s = obj["sweep"];
        if (!s.is_object())
            throw ConfigError("config field 'sweep': must be an object");
        reject_unknown_keys(s, {"axis", "grid"}, "sweep.");
        SweepSpec sw;
        sw.axis = s.value("axis", std::string("kappa"));
        if (sw.axis != "kappa" && sw.axis != "bc_over_b" &&
            sw.axis != "lambda_u_factor")
            throw ConfigError(
                "config field 'sweep.axis': must be 'kappa', 'bc_over_b', or "
                "'lambda_u_factor'");
        if (!s.contains("grid"))
            throw ConfigError("config field 'sweep.grid': required");
        sw.grid = s["grid"].get<std::vector<double>>();
        if (sw.grid.empty())
            throw ConfigError("config field 'sweep.grid': must be nonempty");
        spec.sweep = sw;
    }

    net.validate();

    // normalized echo embedded in every output file
    nlohmann::json echo;
    echo["lambda0"] = net.lambda0;
    echo["lambda_u"] = net.lambda_u;
    echo["alpha"] = net.alpha;
    echo["c2"] = net.c2;
    echo["kappa"] = net.kappa;
    echo["r_c"] = net.r_c();
    echo["pilots"] = {{"total", net.plan.total},
                      {"cc", net.plan.cc_count},
                      {"ce", net.plan.ce_count},
                      {"reuse_factor", net.plan.reuse_factor},
                      {"coherence", net.plan.coherence_symbols}};
    echo["group_inclusion"] = net.group_inclusion;
    echo["ce_group_mode"] =
        spec.sim.ce_group_mode == CeGroupMode::random_group ? "random"
                                                            : "same_set";
    echo["mode"] = spec.sim.mode == PilotMode::fpr ? "fpr" : "reuse1";
    echo["window_factor"] = spec.sim.window_factor;
    echo["guard_factor"] = spec.sim.guard_factor;
    echo["condition_origin_bs"] = spec.sim.condition_origin_bs;
    echo["thresholds_db"] = spec.thresholds_db;
    if (net.utilization_override_cc)
        echo["utilization_override_cc"] = *net.utilization_override_cc;
    if (net.utilization_override_ce)
        echo["utilization_override_ce"] = *net.utilization_override_ce;
    if (spec.sweep) {
        echo["sweep_axis"] = spec.sweep->axis;
        echo["sweep_grid"] = spec.sweep->grid;
    }
    spec.echo = std::move(echo);
    return spec;
}

ExperimentSpec parse_config_text(const std::string& text) {
    std::string trimmed;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty())
            trimmed.push_back(c);
    if (trimmed.empty()) return parse_config_json(nlohmann::json::object());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config_json(j);
}

ExperimentSpec parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

const char* command_name(Command c) {
    switch (c) {
        case Command::areas: return "areas";
        case Command::pcf: return "pcf";
        case Command::coverage: return "coverage";
        case Command::se: return "se";
        case Command::simulate: return "simulate";
        case Command::validate: return "validate";
        case Command::sweep: return "sweep";
    }
    return "unknown";
}

Command command_from_name(const std::string& name) {
    for (Command c : {Command::areas, Command::pcf, Command::coverage,
                      Command::se, Command::simulate, Command::validate,
                      Command::sweep})
        if (name == command_name(c)) return c;
    throw ConfigError("unknown command '" + name + "'");
}

}  // namespace pilotgeom
