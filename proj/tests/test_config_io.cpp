#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "snnevo/config.hpp"
#include "snnevo/io.hpp"

using namespace snnevo;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("the default configuration validates cleanly") {
    Config cfg;
    CHECK(validate(cfg).empty());
}

TEST_CASE("unknown keys are rejected by name") {
    Config cfg;
    const auto errors = apply_json(cfg, nlohmann::json::parse(R"({
        "arena": {"n_bots": 12, "wibble": 3},
        "flux": {}
    })"));
    REQUIRE(errors.size() == 2);
    CHECK(errors[0].find("flux") != std::string::npos);
    CHECK(errors[1].find("arena.wibble") != std::string::npos);
    CHECK(cfg.arena.n_bots == 12); // known keys still applied
}

TEST_CASE("type mismatches are reported with their key") {
    Config cfg;
    const auto errors =
        apply_json(cfg, nlohmann::json::parse(R"({"snn": {"v_threshold": "high"}})"));
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("snn.v_threshold") != std::string::npos);
}

TEST_CASE("strategy names parse and bad ones are flagged") {
    Config cfg;
    CHECK(apply_json(cfg, nlohmann::json::parse(R"({"evolution":{"strategy":"crossover"}})")).empty());
    CHECK(cfg.evolution.strategy == Strategy::crossover_with_mutation);
    CHECK(apply_json(cfg, nlohmann::json::parse(R"({"evolution":{"strategy":"mutation"}})")).empty());
    CHECK(cfg.evolution.strategy == Strategy::mutation);
    const auto errors =
        apply_json(cfg, nlohmann::json::parse(R"({"evolution":{"strategy":"tournament"}})"));
    REQUIRE(errors.size() == 1);
}

TEST_CASE("constraint violations list every offending value") {
    Config cfg;
    cfg.snn.leak = 1.5;
    cfg.snn.v_threshold = -1.0;
    cfg.arena.n_bots = 0;
    const auto errors = validate(cfg);
    CHECK(errors.size() == 3);
}

TEST_CASE("crossover requires an even network dimension") {
    Config cfg;
    cfg.snn.n_neurons = 31;
    cfg.evolution.strategy = Strategy::crossover_with_mutation;
    const auto errors = validate(cfg);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("even") != std::string::npos);

    cfg.evolution.strategy = Strategy::mutation;
    CHECK(validate(cfg).empty()); // odd is fine without crossover
}

TEST_CASE("config snapshots round-trip through JSON") {
    Config cfg;
    cfg.arena.n_food = 8;
    cfg.snn.leak = 0.02;
    cfg.evolution.mutation_sigma = 0.07;
    cfg.evolution.strategy = Strategy::crossover_with_mutation;
    cfg.experiment.seed = 991;
    cfg.experiment.max_generations = 1234;
    cfg.analysis.convergence_bin_width = 80.0;

    Config back;
    CHECK(apply_json(back, nlohmann::json::parse(to_json(cfg).dump())).empty());
    CHECK(back.arena.n_food == 8);
    CHECK(back.snn.leak == 0.02);
    CHECK(back.evolution.mutation_sigma == 0.07);
    CHECK(back.evolution.strategy == Strategy::crossover_with_mutation);
    CHECK(back.experiment.seed == 991);
    CHECK(back.experiment.max_generations == 1234);
    CHECK(back.analysis.convergence_bin_width == 80.0);
}

TEST_CASE("load_config_file applies overrides on top of defaults") {
    const auto path = temp_file("snnevo_cfg_test.json",
                                R"({"experiment": {"seed": 17}, "arena": {"n_food": 3}})");
    Config cfg;
    std::vector<std::string> errors;
    CHECK(load_config_file(path.string(), cfg, errors));
    CHECK(errors.empty());
    CHECK(cfg.experiment.seed == 17);
    CHECK(cfg.arena.n_food == 3);
    CHECK(cfg.arena.n_bots == 10); // untouched default
    std::filesystem::remove(path);
}

TEST_CASE("double formatting round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, 717.25, 2935.0, 1e-12, 123456789.123456789}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("trajectory files round-trip exactly") {
    Trajectory t;
    t.seed = 4;
    Pcg32 rng = make_stream(44, 0);
    for (std::int64_t g = 49; g < 300; ++g)
        t.points.push_back({g, 500.0 + 2000.0 * rng.next_double()});

    const auto path = std::filesystem::temp_directory_path() / "snnevo_traj_test.csv";
    write_text_file(path.string(), trajectory_csv(t));
    const auto back = read_trajectory_csv(path.string());
    REQUIRE(back.size() == t.points.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        REQUIRE(back[i].generation == t.points[i].generation);
        REQUIRE(back[i].t_value == t.points[i].t_value);
    }
    std::filesystem::remove(path);
}

TEST_CASE("malformed trajectory rows are reported with their line number") {
    const auto path = temp_file("snnevo_bad_traj.csv", "generation,T\n49,700\nnonsense\n");
    CHECK_THROWS_WITH_AS(read_trajectory_csv(path.string()), doctest::Contains(":3:"), ParseError);
    std::filesystem::remove(path);

    const auto path2 = temp_file("snnevo_bad_header.csv", "gen;T\n");
    CHECK_THROWS_WITH_AS(read_trajectory_csv(path2.string()), doctest::Contains(":1:"), ParseError);
    std::filesystem::remove(path2);
}

TEST_CASE("capture logs render one row per event") {
    CaptureLog log = {{10, 3, 0}, {25, 7, 1}};
    CHECK(capture_log_csv(log) == "timestep,bot_id,generation\n10,3,0\n25,7,1\n");
}

TEST_CASE("manifest carries config, seeds, outputs and failures") {
    RunManifest m;
    m.config.experiment.seed = 5;
    m.seeds = {5, 6};
    m.outputs = {"a/trajectory.csv"};
    m.failures = {{6, "boom"}};
    m.started = "2026-01-01T00:00:00Z";
    m.finished = "2026-01-01T00:05:00Z";
    const auto j = manifest_json(m);
    CHECK(j["seeds"].size() == 2);
    CHECK(j["config"]["experiment"]["seed"] == 5);
    CHECK(j["failures"][0]["seed"] == 6);
    CHECK(j["rng_scheme"] == std::string(kRngScheme));
    CHECK(j["outputs"][0] == "a/trajectory.csv");
}

TEST_CASE("metadata sidecar pins the tool, scheme, seed and full config") {
    Config cfg;
    cfg.experiment.seed = 77;
    const auto j = metadata_json(cfg);
    CHECK(j["seed"] == 77);
    CHECK(j["strategy"] == "mutation");
    CHECK(j["config"]["arena"]["capture_dist_sq"] == 13.0);
    CHECK(j["config"]["snn"]["n_neurons"] == 30);
}
