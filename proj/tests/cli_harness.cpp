// End-to-end checks of the command-line tool. Takes the path of the built
// binary as argv[1], drives it through std::system in a scratch directory and
// inspects exit codes and output files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "snnevo/analysis.hpp"
#include "snnevo/io.hpp"

namespace fs = std::filesystem;
using namespace snnevo;

namespace {

int g_failures = 0;

#define EXPECT(cond)                                                                 \
    do {                                                                             \
        if (!(cond)) {                                                               \
            ++g_failures;                                                            \
            std::cerr << "FAILED at " << __LINE__ << ": " << #cond << "\n";          \
        }                                                                            \
    } while (0)

std::string g_binary;
fs::path g_work;

int run_cmd(const std::string& args, const std::string& log_name = "cmd") {
    const std::string cmd = g_binary + " " + args + " >" + (g_work / (log_name + ".out")).string() +
                            " 2>" + (g_work / (log_name + ".err")).string();
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

void write_synthetic_ensemble(const fs::path& dir, int n_seeds) {
    for (int i = 0; i < n_seeds; ++i) {
        Trajectory t;
        t.seed = static_cast<std::uint64_t>(i + 1);
        const double inflection = 1000.0 + 40.0 * i;
        for (std::int64_t g = 49; g < 4000; ++g)
            t.points.push_back(
                {g, eval_logistic(static_cast<double>(g), 3000.0, 0.02, inflection, 700.0)});
        const fs::path seed_dir = dir / ("seed_" + std::to_string(i + 1));
        fs::create_directories(seed_dir);
        write_text_file((seed_dir / "trajectory.csv").string(), trajectory_csv(t));
    }
}

void test_run_smoke_and_determinism() {
    const fs::path out1 = g_work / "run1";
    const fs::path out2 = g_work / "run2";
    EXPECT(run_cmd("run --seed 1 --generations 100 --out " + out1.string(), "run1") == 0);
    EXPECT(run_cmd("run --seed 1 --generations 100 --out " + out2.string(), "run2") == 0);

    EXPECT(fs::exists(out1 / "trajectory.csv"));
    EXPECT(fs::exists(out1 / "captures.csv"));
    EXPECT(fs::exists(out1 / "metadata.json"));
    EXPECT(fs::exists(out1 / "manifest.json"));

    const std::string t1 = slurp(out1 / "trajectory.csv");
    EXPECT(count_lines(t1) <= 101); // header plus at most one row per generation
    EXPECT(t1 == slurp(out2 / "trajectory.csv"));
    EXPECT(slurp(out1 / "captures.csv") == slurp(out2 / "captures.csv"));

    const auto manifest = nlohmann::json::parse(slurp(out1 / "manifest.json"));
    EXPECT(manifest["seeds"].size() == 1);
    EXPECT(manifest["config"]["experiment"]["max_generations"] == 100);
    EXPECT(manifest["outputs"].size() >= 4);
}

void test_dump_flags() {
    const fs::path out = g_work / "run_dumps";
    EXPECT(run_cmd("run --seed 3 --generations 5 --dump-trajectory --dump-phenotypes --out " +
                       out.string(),
                   "dumps") == 0);
    const std::string steps = slurp(out / "steps.txt");
    EXPECT(steps.rfind("# timestep,kind,id", 0) == 0);
    EXPECT(steps.find(",bot,") != std::string::npos);
    EXPECT(steps.find(",food,") != std::string::npos);

    const std::string phenotypes = slurp(out / "phenotypes.jsonl");
    EXPECT(count_lines(phenotypes) == 5); // one record per completed generation
    std::istringstream lines(phenotypes);
    std::string first;
    std::getline(lines, first);
    const auto j = nlohmann::json::parse(first);
    EXPECT(j["bots"].size() == 10);
    EXPECT(j["bots"][0]["weights"].size() == 900);
}

void test_unknown_config_key() {
    const fs::path cfg = g_work / "bad.json";
    write_text_file(cfg.string(), R"({"experiment": {"sed": 1}})");
    const int rc = run_cmd("run --config " + cfg.string() + " --out " + (g_work / "x").string(),
                           "badkey");
    EXPECT(rc == 2);
    const std::string err = slurp(g_work / "badkey.err");
    EXPECT(err.find("experiment.sed") != std::string::npos);
}

void test_invalid_config_value() {
    const fs::path cfg = g_work / "invalid.json";
    write_text_file(cfg.string(), R"({"snn": {"leak": 1.5}})");
    const int rc =
        run_cmd("run --config " + cfg.string() + " --out " + (g_work / "y").string(), "badval");
    EXPECT(rc == 2);
    EXPECT(slurp(g_work / "badval.err").find("snn.leak") != std::string::npos);
}

void test_ensemble_layout_and_parallel_determinism() {
    const fs::path e1 = g_work / "ens_j1";
    const fs::path e3 = g_work / "ens_j3";
    EXPECT(run_cmd("ensemble --seed 10 --seeds 3 --jobs 1 --generations 200 --out " + e1.string(),
                   "ens1") == 0);
    EXPECT(run_cmd("ensemble --seed 10 --seeds 3 --jobs 3 --generations 200 --out " + e3.string(),
                   "ens3") == 0);

    for (int s = 10; s <= 12; ++s) {
        const fs::path d1 = e1 / ("seed_" + std::to_string(s));
        const fs::path d3 = e3 / ("seed_" + std::to_string(s));
        EXPECT(fs::is_directory(d1));
        EXPECT(fs::is_directory(d3));
        EXPECT(slurp(d1 / "trajectory.csv") == slurp(d3 / "trajectory.csv"));
        EXPECT(slurp(d1 / "captures.csv") == slurp(d3 / "captures.csv"));
    }
}

void test_zero_seeds_is_usage_error() {
    EXPECT(run_cmd("ensemble --seeds 0 --out " + (g_work / "z").string(), "zeroseeds") == 1);
}

void test_analyze_single() {
    // A noiseless synthetic trajectory must come back within a tenth of a
    // percent on every parameter.
    Trajectory t;
    for (std::int64_t g = 49; g < 5000; ++g)
        t.points.push_back({g, eval_logistic(static_cast<double>(g), 2935.0, 0.020, 1214.0, 717.0)});
    const fs::path file = g_work / "synthetic.csv";
    write_text_file(file.string(), trajectory_csv(t));

    const fs::path out = g_work / "analyze_single";
    EXPECT(run_cmd("analyze --mode single " + file.string() + " --out " + out.string(),
                   "single") == 0);
    const auto fit = nlohmann::json::parse(slurp(out / "fit.json"));
    EXPECT(fit["converged"] == true);
    EXPECT(std::fabs(fit["inflection"].get<double>() - 1214.0) < 1.214);
    EXPECT(std::fabs(fit["amplitude"].get<double>() - 2935.0) < 2.935);
    EXPECT(std::fabs(fit["convergence_point"].get<double>() - 717.0) < 0.717);
    EXPECT(std::fabs(fit["steepness"].get<double>() - 0.020) < 2e-5);
}

void test_analyze_compare_self_is_zero_speedup() {
    const fs::path ens = g_work / "synth_ens";
    write_synthetic_ensemble(ens, 12);

    const fs::path out = g_work / "cmp";
    EXPECT(run_cmd("analyze --mode compare " + ens.string() + " " + ens.string() + " --out " +
                       out.string(),
                   "cmp") == 0);
    const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    EXPECT(summary["speedup"].get<double>() == 0.0);
    EXPECT(fs::exists(out / "summary.csv"));
    EXPECT(fs::exists(out / "summary.txt"));
}

void test_analyze_ensemble_outputs() {
    const fs::path ens = g_work / "synth_ens2";
    write_synthetic_ensemble(ens, 12);
    const fs::path out = g_work / "ens_analysis";
    EXPECT(run_cmd("analyze --mode ensemble " + ens.string() + " --out " + out.string(),
                   "ensan") == 0);
    EXPECT(fs::exists(out / "ensemble_fits.csv"));
    EXPECT(fs::exists(out / "ensemble_inflection_histogram.csv"));
    EXPECT(fs::exists(out / "ensemble_convergence_histogram.csv"));
    EXPECT(fs::exists(out / "ensemble_stats.json"));
    const std::string fits = slurp(out / "ensemble_fits.csv");
    EXPECT(count_lines(fits) == 13); // header + 12 members
}

void test_analyze_missing_input() {
    EXPECT(run_cmd("analyze --mode ensemble " + (g_work / "does_not_exist").string() + " --out " +
                       (g_work / "na").string(),
                   "missing") == 2);
}

void test_malformed_trajectory_reports_line() {
    const fs::path file = g_work / "broken.csv";
    write_text_file(file.string(), "generation,T\n49,700\noops,not,a,row\n");
    const int rc = run_cmd("analyze --mode single " + file.string() + " --out " +
                               (g_work / "broken_out").string(),
                           "broken");
    EXPECT(rc == 2);
    EXPECT(slurp(g_work / "broken.err").find(":3:") != std::string::npos);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_harness <path-to-snnevo-binary>\n";
        return 2;
    }
    g_binary = argv[1];
    g_work = fs::temp_directory_path() / "snnevo_cli_harness";
    fs::remove_all(g_work);
    fs::create_directories(g_work);

    test_run_smoke_and_determinism();
    test_dump_flags();
    test_unknown_config_key();
    test_invalid_config_value();
    test_ensemble_layout_and_parallel_determinism();
    test_zero_seeds_is_usage_error();
    test_analyze_single();
    test_analyze_compare_self_is_zero_speedup();
    test_analyze_ensemble_outputs();
    test_analyze_missing_input();
    test_malformed_trajectory_reports_line();

    if (g_failures == 0) {
        std::cout << "cli harness: all checks passed\n";
        fs::remove_all(g_work);
        return 0;
    }
    std::cout << "cli harness: " << g_failures << " checks FAILED (work dir kept at " << g_work
              << ")\n";
    return 1;
}
