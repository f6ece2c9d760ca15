#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pilotgeom/cli.hpp"
#include "pilotgeom/config.hpp"

using namespace pilotgeom;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("config_cli");

TEST_CASE("empty config yields the baseline defaults") {
    const ExperimentSpec spec = parse_config_text("");
    CHECK(spec.network.lambda0 == 4e-6);
    CHECK(spec.network.lambda_u == doctest::Approx(150 * 4e-6));
    CHECK(spec.network.alpha == 3.7);
    CHECK(spec.network.c2 == 1.25);
    CHECK(spec.network.kappa == 0.6);
    CHECK(spec.network.plan.total == 100);
    CHECK(spec.network.plan.cc_count == 58);
    CHECK(spec.network.plan.ce_count == 14);
    CHECK(spec.network.plan.reuse_factor == 3);
    CHECK(spec.network.plan.coherence_symbols == 200);
    CHECK(spec.seed == 1);
}

TEST_CASE("pilot partition is validated") {
    CHECK_NOTHROW(parse_config_text(
        R"({"pilots": {"total": 100, "cc": 58, "ce": 14, "reuse_factor": 3}})"));
    CHECK_THROWS_WITH_AS(
        parse_config_text(
            R"({"pilots": {"total": 100, "cc": 60, "ce": 14, "reuse_factor": 3}})"),
        doctest::Contains("partition"), std::invalid_argument);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"lambda_zero": 1e-6})"),
                         doctest::Contains("unknown config key"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text(R"({"pilots": {"total": 100, "c_c": 58}})"),
        doctest::Contains("pilots.c_c"), ConfigError);
}

TEST_CASE("kappa and r_c must agree when both are given") {
    // kappa = 1 at the default density maps to about 252.31 m
    const double rc = 1.0 / std::sqrt(kPi * 1.25 * 4e-6);
    std::ostringstream ok;
    ok << R"({"kappa": 1.0, "r_c": )" << cli::format_double(rc) << "}";
    const ExperimentSpec spec = parse_config_text(ok.str());
    CHECK(spec.network.r_c() == doctest::Approx(252.3132522).epsilon(1e-8));
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"kappa": 1.0, "r_c": 250.0})"),
                         doctest::Contains("disagree"), ConfigError);

    // r_c alone determines kappa
    const ExperimentSpec from_rc = parse_config_text(R"({"r_c": 250.0})");
    CHECK(from_rc.network.r_c() == doctest::Approx(250.0).epsilon(1e-12));
}

TEST_CASE("user density can be absolute or relative but not both") {
    CHECK(parse_config_text(R"({"lambda_u": 1e-4})").network.lambda_u == 1e-4);
    CHECK(parse_config_text(R"({"lambda_u_factor": 80})").network.lambda_u ==
          doctest::Approx(80 * 4e-6));
    CHECK_THROWS_AS(
        parse_config_text(R"({"lambda_u": 1e-4, "lambda_u_factor": 80})"),
        ConfigError);
}

TEST_CASE("group inclusion pairs with the pool coloring by default") {
    CHECK(parse_config_text(R"({"ce_group_mode": "random"})")
              .network.group_inclusion == doctest::Approx(1.0 / 3.0));
    CHECK(parse_config_text(R"({"ce_group_mode": "same_set"})")
              .network.group_inclusion == 1.0);
    CHECK(parse_config_text(
              R"({"ce_group_mode": "random", "group_inclusion": 1.0})")
              .network.group_inclusion == 1.0);
    // default simulator coloring is the random per-cell pool
    CHECK(parse_config_text("").sim.ce_group_mode ==
          CeGroupMode::random_group);
}

TEST_CASE("sweep validation") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"sweep": {"axis": "kappa"}})"),
                         doctest::Contains("grid"), ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"sweep": {"axis": "bogus", "grid": [1]}})"),
        ConfigError);
    const ExperimentSpec spec = parse_config_text(
        R"({"sweep": {"axis": "kappa", "grid": [0.6, 0.8]}})");
    REQUIRE(spec.sweep.has_value());
    CHECK(spec.sweep->grid.size() == 2);
}

TEST_CASE("partition rule helper") {
    CHECK(cc_pilot_fraction_rule(1.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)));
    const PilotPlan plan = plan_from_rule(100, 3, 0.8, 200);
    CHECK(plan.cc_count + plan.reuse_factor * plan.ce_count == 100);
    // nearest feasible cc count to 47.27 with divisibility by 3
    CHECK(plan.cc_count == 46);
    CHECK(plan_from_rule(100, 3, 1.0, 200).cc_count == 64);
}

TEST_CASE("numeric formatting is compact and deterministic") {
    CHECK(cli::format_double(0.6) == "0.6");
    CHECK(cli::format_double(4e-6) == "4e-06");
    CHECK(cli::format_double(252.3132522) == "252.313252");
    CHECK(cli::format_double(1.0 / 3.0) == "0.333333333");
}

TEST_CASE("csv files embed the config echo, seed, and version") {
    const ExperimentSpec spec = parse_config_text("");
    const std::string path = "test_out/header_check.csv";
    fs::create_directories("test_out");
    cli::write_csv(path, spec.echo, 42, {"a", "b"}, {{1.5, 2.5}, {3.0, 4.0}});
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line.find("# config: {") == 0);
    std::getline(in, line);
    CHECK(line == "# seed: 42");
    std::getline(in, line);
    CHECK(line == std::string("# version: ") + cli::kVersion);
    std::getline(in, line);
    CHECK(line == "a,b");
    std::getline(in, line);
    CHECK(line == "1.5,2.5");
    fs::remove_all("test_out");
}

TEST_CASE("simulate command writes byte-identical outputs per seed") {
    ExperimentSpec spec = parse_config_text(
        R"({"realizations": 4, "thresholds_db": [0], "seed": 9})");
    spec.command = Command::simulate;
    auto slurp_dir = [](const std::string& dir) {
        std::string all;
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f, std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            all += f.filename().string() + "\n" + buf.str();
        }
        return all;
    };
    spec.out_dir = "test_out/run_a";
    CHECK(cli::run(spec) == 0);
    spec.out_dir = "test_out/run_b";
    CHECK(cli::run(spec) == 0);
    CHECK(slurp_dir("test_out/run_a") == slurp_dir("test_out/run_b"));
    CHECK_FALSE(slurp_dir("test_out/run_a").empty());
    fs::remove_all("test_out");
}

TEST_CASE("areas command emits model and empirical grids") {
    ExperimentSpec spec = parse_config_text(
        R"({"realizations": 3000, "seed": 3, "kappa": 0.8})");
    spec.command = Command::areas;
    spec.out_dir = "test_out/areas";
    CHECK(cli::run(spec) == 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(spec.out_dir)) {
        ++files;
        std::ifstream in(e.path());
        std::string line;
        int rows = 0;
        bool saw_header = false;
        while (std::getline(in, line)) {
            if (line.rfind("# config", 0) == 0) saw_header = true;
            if (line.rfind("#", 0) != 0 && !line.empty()) ++rows;
        }
        CHECK(saw_header);
        CHECK(rows >= 100);
    }
    CHECK(files == 2);
    fs::remove_all("test_out");
}

TEST_SUITE_END();
