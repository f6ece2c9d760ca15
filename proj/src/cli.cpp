#include "pilotgeom/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pilotgeom::cli {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> header_rows(const nlohmann::json& echo,
                                     std::uint64_t seed) {
    return {std::string("# config: ") + echo.dump(),
            std::string("# seed: ") + std::to_string(seed),
            std::string("# version: ") + kVersion};
}

std::string out_file(const ExperimentSpec& spec, const std::string& stem,
                     const std::string& ext = ".csv") {
    fs::create_directories(spec.out_dir);
    std::ostringstream name;
    name << stem << "_" << format_double(spec.network.kappa) << "_"
         << spec.seed << ext;
    return (fs::path(spec.out_dir) / name.str()).string();
}

int default_realizations(const ExperimentSpec& spec, int fallback) {
    return spec.realizations > 0 ? spec.realizations : fallback;
}

}  // namespace

void write_csv(const std::string& path, const nlohmann::json& config_echo,
               std::uint64_t seed, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    for (const std::string& line : header_rows(config_echo, seed))
        out << line << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
}

namespace {

int run_areas(const ExperimentSpec& spec) {
    const NetworkConfig& net = spec.network;
    const double r_c = net.r_c();
    const long cells = default_realizations(spec, 100000);
    CellSampleBatch batch = harvest_interior_cells(
        net.lambda0, r_c, cells, RngStream(spec.seed, 11),
        spec.sim.window_factor, spec.sim.guard_factor);

    for (RegionKind kind : {RegionKind::cell_center, RegionKind::cell_edge}) {
        const bool center = kind == RegionKind::cell_center;
        const MixedAreaDistribution model =
            build_area_distribution(kind, net.lambda0, r_c);
        std::vector<double>& samples =
            center ? batch.cc_areas : batch.ce_areas;
        std::sort(samples.begin(), samples.end());
        const double top = center ? model.atom_location : samples.back();
        std::vector<std::vector<double>> rows;
        const int grid = 400;
        for (int i = 0; i <= grid; ++i) {
            const double x = top * i / grid;
            const double empirical =
                std::upper_bound(samples.begin(), samples.end(), x) -
                samples.begin();
            rows.push_back({x, model.cdf(x), empirical / samples.size()});
        }
        const KsKlResult gof = ks_kl(samples, model);
        std::printf("areas %s: ks=%s kl=%s (n=%zu)\n",
                    center ? "cell-center" : "cell-edge",
                    format_double(gof.ks).c_str(),
                    format_double(gof.kl).c_str(), samples.size());
        write_csv(out_file(spec, center ? "areas_cc" : "areas_ce"), spec.echo,
                  spec.seed, {"x", "model_cdf", "empirical_cdf"}, rows);
    }
    return 0;
}

int run_pcf(const ExperimentSpec& spec) {
    const NetworkConfig& net = spec.network;
    const int patterns = default_realizations(spec, 2000);
    const double c2 = net.c2;
    const double kappa = net.kappa;
    for (RegionKind kind : {RegionKind::cell_center, RegionKind::cell_edge}) {
        const bool center = kind == RegionKind::cell_center;
        const double rc_scaled = scaled_threshold_radius(kappa, c2);
        const double lo = center ? 0.05 : rc_scaled;
        std::vector<double> edges;
        for (double e = lo; e <= 2.0 + 1e-12; e += 0.05) edges.push_back(e);
        RngStream base(spec.seed, center ? 21 : 22);
        std::vector<std::vector<Vec2>> collected;
        collected.reserve(patterns);
        long seen = 0, with_edge = 0;
        for (int i = 0; i < patterns; ++i) {
            RngStream rng = base.substream(i);
            collected.push_back(sample_interferer_pattern(
                kind, kappa, c2, 10.0, rng, &seen, &with_edge));
        }
        const double p_edge =
            seen > 0 ? static_cast<double>(with_edge) / seen : 1.0;
        const PcfEstimate est =
            estimate_pcf(collected, center ? 1.0 : p_edge, edges);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < est.value.size(); ++i) {
            const double mid = 0.5 * (est.bin_lo[i] + est.bin_hi[i]);
            const double model =
                center ? cc_pair_correlation(mid, kappa, c2)
                       : ce_pair_correlation(mid, kappa, c2, p_edge);
            rows.push_back({mid, model, est.value[i], est.se[i]});
        }
        write_csv(out_file(spec, center ? "pcf_cc" : "pcf_ce"), spec.echo,
                  spec.seed,
                  {"r_scaled", "model_pcf", "empirical_pcf", "empirical_stderr"},
                  rows);
    }
    return 0;
}

int run_coverage(const ExperimentSpec& spec) {
    const AnalyticalModel model = AnalyticalModel::build(spec.network);
    const SimulationSummary summary =
        run_experiment(spec.network, spec.sim, spec.thresholds_db,
                       default_realizations(spec, 2000), spec.seed);
    for (RegionKind kind : {RegionKind::cell_center, RegionKind::cell_edge}) {
        const bool center = kind == RegionKind::cell_center;
        const Curve& curve =
            summary.curves.at(center ? "coverage_cc" : "coverage_ce");
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < spec.thresholds_db.size(); ++i) {
            const double t = std::pow(10.0, spec.thresholds_db[i] / 10.0);
            rows.push_back({spec.thresholds_db[i], model.coverage(kind, t),
                            curve.y[i], curve.se[i]});
        }
        write_csv(out_file(spec, center ? "coverage_cc" : "coverage_ce"),
                  spec.echo, spec.seed,
                  {"threshold_db", "analytical", "simulated", "sim_stderr"},
                  rows);
    }
    return 0;
}

int run_se(const ExperimentSpec& spec) {
    const AnalyticalModel model = AnalyticalModel::build(spec.network);
    const SimulationSummary summary =
        run_experiment(spec.network, spec.sim, {0.0},
                       default_realizations(spec, 1000), spec.seed);
    std::vector<std::vector<double>> rows;
    rows.push_back({spec.network.kappa,
                    model.avg_user_se(RegionKind::cell_center),
                    model.avg_user_se(RegionKind::cell_edge),
                    model.avg_cell_se(), summary.scalars.at("cc_user_se"),
                    summary.scalars.at("ce_user_se"),
                    summary.scalars.at("cell_se")});
    write_csv(out_file(spec, "se"), spec.echo, spec.seed,
              {"knob", "cc_user_se", "ce_user_se", "cell_se",
               "cc_user_se_sim", "ce_user_se_sim", "cell_se_sim"},
              rows);
    return 0;
}

nlohmann::json summary_to_json(const ExperimentSpec& spec,
                               const SimulationSummary& summary) {
    nlohmann::json j;
    j["config"] = spec.echo;
    j["seed"] = summary.seed;
    j["realizations"] = summary.realizations;
    j["version"] = kVersion;
    for (const auto& [name, curve] : summary.curves) {
        nlohmann::json c;
        c["x"] = curve.x;
        c["y"] = curve.y;
        c["stderr"] = curve.se;
        c["n"] = curve.n;
        j["curves"][name] = c;
    }
    j["scalars"] = summary.scalars;
    return j;
}

int run_simulate(const ExperimentSpec& spec) {
    const SimulationSummary summary =
        run_experiment(spec.network, spec.sim, spec.thresholds_db,
                       default_realizations(spec, 500), spec.seed);
    const nlohmann::json j = summary_to_json(spec, summary);
    const std::string path = out_file(spec, "simulate", ".json");
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";

    // geometry dump of the first realization, one row per BS
    RngStream rng = RngStream(spec.seed, 0).substream(0);
    const Realization first = run_realization(spec.network, spec.sim, rng);
    std::vector<std::vector<double>> rows;
    for (const CellGeometry& cell : first.cells)
        rows.push_back({cell.bs.x, cell.bs.y, cell.cell_area, cell.cc_area,
                        cell.ce_area, cell.r_m, cell.r_M});
    write_csv(out_file(spec, "simulate_cells"), spec.echo, spec.seed,
              {"bs_x", "bs_y", "cell_area", "cc_area", "ce_area", "r_m",
               "r_M"},
              rows);
    for (const auto& [name, curve] : summary.curves) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < curve.x.size(); ++i)
            rows.push_back({curve.x[i], curve.y[i], curve.se[i],
                            static_cast<double>(curve.n[i])});
        write_csv(out_file(spec, "simulate_" + name), spec.echo, spec.seed,
                  {"x", "y", "stderr", "n"}, rows);
    }
    return 0;
}

int run_sweep(const ExperimentSpec& spec) {
    if (!spec.sweep) throw ConfigError("sweep command requires a sweep spec");
    std::vector<std::vector<double>> rows;
    for (double knob : spec.sweep->grid) {
        ExperimentSpec point = spec;
        NetworkConfig& net = point.network;
        if (spec.sweep->axis == "kappa") {
            net.kappa = knob;
            net.plan = plan_from_rule(net.plan.total, net.plan.reuse_factor,
                                      knob, net.plan.coherence_symbols);
        } else if (spec.sweep->axis == "bc_over_b") {
            const int cc = static_cast<int>(std::lround(knob * net.plan.total));
            PilotPlan plan = net.plan;
            plan.cc_count = cc;
            plan.ce_count = (plan.total - cc) / plan.reuse_factor;
            if (plan.cc_count + plan.reuse_factor * plan.ce_count != plan.total)
                throw ConfigError(
                    "sweep point " + format_double(knob) +
                    ": (total - cc) must be divisible by reuse_factor");
            net.plan = plan;
        } else {  // lambda_u_factor
            net.lambda_u = knob * net.lambda0;
        }
        const AnalyticalModel model = AnalyticalModel::build(net);
        const SimulationSummary summary =
            run_experiment(net, point.sim, {0.0},
                           default_realizations(spec, 400), spec.seed);
        rows.push_back({knob, cc_pilot_fraction_rule(net.kappa),
                        static_cast<double>(net.plan.cc_count) /
                            net.plan.total,
                        model.avg_user_se(RegionKind::cell_center),
                        model.avg_user_se(RegionKind::cell_edge),
                        model.avg_cell_se(), summary.scalars.at("cc_user_se"),
                        summary.scalars.at("ce_user_se"),
                        summary.scalars.at("cell_se")});
    }
    write_csv(out_file(spec, "sweep_" + spec.sweep->axis), spec.echo,
              spec.seed,
              {"knob", "bc_over_b_rule", "bc_over_b", "cc_user_se",
               "ce_user_se", "cell_se", "cc_user_se_sim", "ce_user_se_sim",
               "cell_se_sim"},
              rows);
    return 0;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_validate(const ExperimentSpec& spec) {
    validation::Options opts =
        spec.quick ? validation::quick_options() : validation::Options{};
    opts.seed = spec.seed;
    if (spec.realizations > 0) opts.coverage_realizations = spec.realizations;

    std::vector<validation::CriterionResult> results;
    const auto rows = validation::table1_rows(opts);
    auto append = [&](std::vector<validation::CriterionResult> v) {
        for (auto& r : v) results.push_back(std::move(r));
    };
    append(validation::criterion_table1(rows));
    append(validation::criterion_moments(opts));
    append(validation::criterion_coverage(opts));
    append(validation::criterion_pcf(opts));
    append(validation::criterion_trends(opts));
    append(validation::criterion_oracle(opts));
    append(determinism_check(spec));

    // Table-I style CSV
    std::vector<std::vector<double>> t1;
    for (const auto& row : rows) {
        t1.push_back({row.r_c, row.ks_cc, row.kl_cc,
                      row.has_ce ? row.ks_ce : std::nan(""),
                      row.has_ce ? row.kl_ce : std::nan("")});
    }
    write_csv(out_file(spec, "validate_table1"), spec.echo, spec.seed,
              {"r_c", "ks_cc", "kl_cc", "ks_ce", "kl_ce"}, t1);

    std::vector<std::vector<double>> crit;
    bool all_pass = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        crit.push_back({static_cast<double>(i), r.value, r.bound,
                        r.pass ? 1.0 : 0.0});
        std::printf("[%s] %-22s %s (value %s, bound %s)\n",
                    r.pass ? "PASS" : "FAIL", r.id.c_str(),
                    r.description.c_str(), format_double(r.value).c_str(),
                    format_double(r.bound).c_str());
        all_pass = all_pass && r.pass;
    }
    write_csv(out_file(spec, "validate_criteria"), spec.echo, spec.seed,
              {"index", "value", "bound", "pass"}, crit);
    std::printf("validate: %s\n", all_pass ? "ALL PASS" : "FAILURES PRESENT");
    return all_pass ? 0 : 1;
}

}  // namespace

std::vector<validation::CriterionResult> determinism_check(
    const ExperimentSpec& spec) {
    std::vector<validation::CriterionResult> out;
    const fs::path scratch =
        fs::path(spec.out_dir) / "determinism";

    auto compare_twice = [&](const char* id, ExperimentSpec run_spec,
                             const std::string& stem) {
        std::vector<std::string> contents;
        for (int rep = 0; rep < 2; ++rep) {
            run_spec.out_dir =
                (scratch / (std::string(id) + std::to_string(rep))).string();
            run(run_spec);
            std::string blob;
            std::vector<fs::path> files;
            for (const auto& entry :
                 fs::recursive_directory_iterator(run_spec.out_dir))
                if (entry.is_regular_file()) files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                blob += f.filename().string();
                blob.push_back('\0');
                blob += slurp(f.string());
            }
            contents.push_back(std::move(blob));
        }
        validation::CriterionResult r;
        r.id = std::string("7.") + id;
        r.description = std::string("repeated ") + stem +
                        " run with the same seed is byte-identical";
        r.pass = contents[0] == contents[1] && !contents[0].empty();
        r.value = r.pass ? 0.0 : 1.0;
        r.bound = 0.0;
        out.push_back(r);
    };

    ExperimentSpec sweep_spec = spec;
    sweep_spec.command = Command::sweep;
    sweep_spec.sweep = SweepSpec{"lambda_u_factor", {100.0, 200.0}};
    sweep_spec.realizations = 40;
    compare_twice("sweep", sweep_spec, "sweep");

    ExperimentSpec sim_spec = spec;
    sim_spec.command = Command::simulate;
    sim_spec.sweep.reset();
    sim_spec.realizations = 30;
    compare_twice("simulate", sim_spec, "simulate");
    return out;
}

int run(const ExperimentSpec& spec) {
    switch (spec.command) {
        case Command::areas: return run_areas(spec);
        case Command::pcf: return run_pcf(spec);
        case Command::coverage: return run_coverage(spec);
        case Command::se: return run_se(spec);
        case Command::simulate: return run_simulate(spec);
        case Command::validate: return run_validate(spec);
        case Command::sweep: return run_sweep(spec);
    }
    return 2;
}

}  // namespace pilotgeom::cli
