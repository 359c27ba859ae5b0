// Command-line front end: reproducible experiment runs, seeded ensembles and
// the analysis pipeline over their outputs.
//
// Exit codes: 0 success, 1 usage error, 2 config/input validation error,
// 3 runtime failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snnevo/analysis.hpp"
#include "snnevo/config.hpp"
#include "snnevo/experiment.hpp"
#include "snnevo/io.hpp"

namespace fs = std::filesystem;
using namespace snnevo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> generations;
    std::optional<std::string> strategy;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::vector<std::string>& errors)
        : std::runtime_error(join(errors)) {}

    static std::string join(const std::vector<std::string>& errors) {
        std::string s;
        for (const std::string& e : errors) {
            if (!s.empty()) s += '\n';
            s += e;
        }
        return s;
    }
};

// Loads the config file (if given) and applies command-line overrides, then
// validates the result. Throws ValidationError listing every offending key.
Config resolve_config(const CommonOptions& opt) {
    Config cfg;
    std::vector<std::string> errors;
    if (!opt.config_path.empty()) load_config_file(opt.config_path, cfg, errors);
    if (!errors.empty()) throw ValidationError(errors);

    if (opt.seed) cfg.experiment.seed = *opt.seed;
    if (opt.generations) cfg.experiment.max_generations = *opt.generations;
    if (opt.strategy) {
        if (*opt.strategy == "mutation")
            cfg.evolution.strategy = Strategy::mutation;
        else if (*opt.strategy == "crossover")
            cfg.evolution.strategy = Strategy::crossover_with_mutation;
        else
            throw ValidationError({"--strategy must be mutation or crossover"});
    }

    errors = validate(cfg);
    if (!errors.empty()) throw ValidationError(errors);
    return cfg;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                     ec.message());
}

void write_experiment_outputs(const fs::path& dir, const Config& cfg,
                              const ExperimentResult& result, std::vector<std::string>& outputs) {
    write_text_file((dir / "trajectory.csv").string(), trajectory_csv(result.trajectory));
    outputs.push_back((dir / "trajectory.csv").string());
    write_text_file((dir / "captures.csv").string(), capture_log_csv(result.log));
    outputs.push_back((dir / "captures.csv").string());
    write_text_file((dir / "metadata.json").string(), metadata_json(cfg).dump(2) + "\n");
    outputs.push_back((dir / "metadata.json").string());
}

int cmd_run(const CommonOptions& opt, bool dump_trajectory, bool dump_phenotypes) {
    const Config cfg = resolve_config(opt);
    const fs::path out = opt.out_dir;
    ensure_dir(out);

    RunManifest manifest;
    manifest.config = cfg;
    manifest.seeds = {cfg.experiment.seed};
    manifest.started = utc_timestamp();

    std::ofstream step_file;
    std::ofstream phenotype_file;
    RunHooks hooks;
    std::string step_buffer;
    if (dump_trajectory) {
        step_file.open(out / "steps.txt", std::ios::binary);
        if (!step_file) throw std::runtime_error("cannot open steps.txt for writing");
        step_file << step_dump_header();
        hooks.on_step = [&](const ArenaState& state, std::span<const CaptureEvent>) {
            step_buffer.clear();
            append_step_dump(step_buffer, state);
            step_file << step_buffer;
        };
        manifest.outputs.push_back((out / "steps.txt").string());
    }
    if (dump_phenotypes) {
        phenotype_file.open(out / "phenotypes.jsonl", std::ios::binary);
        if (!phenotype_file) throw std::runtime_error("cannot open phenotypes.jsonl for writing");
        hooks.on_generation = [&](const ArenaState& state) {
            phenotype_file << phenotype_dump_line(state);
        };
        manifest.outputs.push_back((out / "phenotypes.jsonl").string());
    }

    const ExperimentResult result = run_experiment(cfg, hooks);
    write_experiment_outputs(out, cfg, result, manifest.outputs);

    manifest.finished = utc_timestamp();
    manifest.outputs.push_back((out / "manifest.json").string());
    write_text_file((out / "manifest.json").string(), manifest_json(manifest).dump(2) + "\n");

    std::cout << "run complete: seed " << cfg.experiment.seed << ", "
              << result.generations << " generations, " << result.total_steps << " steps, "
              << result.log.size() << " captures, " << result.trajectory.points.size()
              << " trajectory points\n";
    return kExitOk;
}

int cmd_ensemble(const CommonOptions& opt, int n_seeds, int jobs) {
    const Config cfg = resolve_config(opt);
    const fs::path out = opt.out_dir;
    ensure_dir(out);

    RunManifest manifest;
    manifest.config = cfg;
    manifest.started = utc_timestamp();

    const std::vector<EnsembleMember> members = run_ensemble(cfg, n_seeds, jobs);

    int n_failed = 0;
    for (const EnsembleMember& member : members) {
        manifest.seeds.push_back(member.seed);
        if (!member.ok) {
            ++n_failed;
            manifest.failures.emplace_back(member.seed, member.error);
            std::cerr << "seed " << member.seed << " failed: " << member.error << "\n";
            continue;
        }
        Config member_cfg = cfg;
        member_cfg.experiment.seed = member.seed;
        const fs::path seed_dir = out / ("seed_" + std::to_string(member.seed));
        ensure_dir(seed_dir);
        write_experiment_outputs(seed_dir, member_cfg, member.result, manifest.outputs);
    }

    manifest.finished = utc_timestamp();
    manifest.outputs.push_back((out / "manifest.json").string());
    write_text_file((out / "manifest.json").string(), manifest_json(manifest).dump(2) + "\n");

    std::cout << "ensemble complete: " << members.size() - static_cast<std::size_t>(n_failed)
              << "/" << members.size() << " runs succeeded\n";
    return n_failed == static_cast<int>(members.size()) ? kExitRuntime : kExitOk;
}

// Collects (seed, trajectory path) pairs for an ensemble directory, sorted by
// seed.
std::vector<std::pair<std::uint64_t, fs::path>> find_ensemble_trajectories(const fs::path& dir) {
    std::vector<std::pair<std::uint64_t, fs::path>> found;
    if (!fs::is_directory(dir))
        throw ValidationError({"not a directory: " + dir.string()});
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (name.rfind("seed_", 0) != 0) continue;
        const fs::path csv = entry.path() / "trajectory.csv";
        if (!fs::exists(csv)) continue;
        try {
            found.emplace_back(std::stoull(name.substr(5)), csv);
        } catch (const std::exception&) {
            continue;
        }
    }
    std::sort(found.begin(), found.end());
    if (found.empty())
        throw ValidationError({"no seed_*/trajectory.csv files under " + dir.string()});
    return found;
}

struct EnsembleFits {
    std::vector<std::uint64_t> seeds;
    std::vector<LogisticFit> fits;
};

EnsembleFits fit_ensemble_dir(const fs::path& dir, const AnalysisParams& params) {
    EnsembleFits out;
    for (const auto& [seed, csv] : find_ensemble_trajectories(dir)) {
        out.seeds.push_back(seed);
        out.fits.push_back(fit_logistic(read_trajectory_csv(csv.string()), std::nullopt,
                                        params.init_slope));
    }
    return out;
}

void write_ensemble_analysis(const fs::path& out, const std::string& label,
                             const EnsembleFits& ef, const AnalysisParams& params) {
    write_text_file((out / (label + "_fits.csv")).string(), fits_csv(ef.seeds, ef.fits));

    std::vector<double> inflections, convergences;
    for (const LogisticFit& f : ef.fits) {
        if (!f.converged) continue;
        inflections.push_back(f.inflection);
        convergences.push_back(f.pedestal);
    }
    if (inflections.empty()) {
        std::cerr << "warning: " << label << ": no converged fits, skipping histograms\n";
        return;
    }
    write_text_file(
        (out / (label + "_inflection_histogram.csv")).string(),
        histogram_csv(build_histogram(inflections, HistogramSpec{params.inflection_bin_width})));
    write_text_file(
        (out / (label + "_convergence_histogram.csv")).string(),
        histogram_csv(build_histogram(convergences, HistogramSpec{params.convergence_bin_width})));
}

int cmd_analyze(const CommonOptions& opt, const std::string& mode,
                const std::vector<std::string>& inputs) {
    const Config cfg = resolve_config(opt);
    const fs::path out = opt.out_dir;
    ensure_dir(out);

    if (mode == "single") {
        if (inputs.size() != 1)
            throw ValidationError({"analyze --mode single expects one trajectory file or run dir"});
        fs::path input = inputs[0];
        if (fs::is_directory(input)) input /= "trajectory.csv";
        if (!fs::exists(input)) throw ValidationError({"no such file: " + input.string()});
        const LogisticFit fit =
            fit_logistic(read_trajectory_csv(input.string()), std::nullopt, cfg.analysis.init_slope);
        write_text_file((out / "fit.json").string(), logistic_fit_json(fit).dump(2) + "\n");
        std::cout << logistic_fit_json(fit).dump(2) << "\n";
        return kExitOk;
    }

    if (mode == "ensemble") {
        if (inputs.size() != 1)
            throw ValidationError({"analyze --mode ensemble expects one ensemble directory"});
        const EnsembleFits ef = fit_ensemble_dir(inputs[0], cfg.analysis);
        write_ensemble_analysis(out, "ensemble", ef, cfg.analysis);
        std::vector<std::string> warnings;
        const StrategyStats stats = summarize_strategy("ensemble", ef.fits, cfg.analysis, warnings);
        write_text_file((out / "ensemble_stats.json").string(),
                        strategy_stats_json(stats).dump(2) + "\n");
        for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
        std::cout << strategy_stats_json(stats).dump(2) << "\n";
        return kExitOk;
    }

    if (mode == "compare") {
        if (inputs.size() != 2)
            throw ValidationError(
                {"analyze --mode compare expects two ensemble directories (baseline first)"});
        const EnsembleFits first = fit_ensemble_dir(inputs[0], cfg.analysis);
        const EnsembleFits second = fit_ensemble_dir(inputs[1], cfg.analysis);
        write_ensemble_analysis(out, "first", first, cfg.analysis);
        write_ensemble_analysis(out, "second", second, cfg.analysis);
        const StrategyComparison cmp =
            compare_strategies(first.fits, second.fits, cfg.analysis,
                               fs::path(inputs[0]).filename().string(),
                               fs::path(inputs[1]).filename().string());
        write_text_file((out / "summary.csv").string(), comparison_csv(cmp));
        write_text_file((out / "summary.txt").string(), comparison_table(cmp));
        nlohmann::ordered_json j;
        j["first"] = strategy_stats_json(cmp.first);
        j["second"] = strategy_stats_json(cmp.second);
        j["speedup"] = cmp.speedup;
        j["warnings"] = cmp.warnings;
        write_text_file((out / "summary.json").string(), j.dump(2) + "\n");
        std::cout << comparison_table(cmp);
        return kExitOk;
    }

    throw ValidationError({"unknown analyze mode: " + mode});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolutionary training of spiking-network foragers: run, ensemble, analyze"};
    app.require_subcommand(1);

    CommonOptions opt;
    bool dump_trajectory = false;
    bool dump_phenotypes = false;
    int n_seeds = 1;
    int jobs = 1;
    std::string mode = "single";
    std::vector<std::string> inputs;

    auto add_common = [&](CLI::App* cmd, bool with_out_default) {
        cmd->add_option("--config", opt.config_path, "JSON config file")
            ->envname("SNNEVO_CONFIG");
        cmd->add_option("--out", opt.out_dir,
                        with_out_default ? "output directory (default: current dir)"
                                         : "output directory")
            ->envname("SNNEVO_OUT");
    };

    CLI::App* run = app.add_subcommand("run", "run one experiment and write its outputs");
    add_common(run, true);
    run->add_option("--seed", opt.seed, "experiment seed")->envname("SNNEVO_SEED");
    run->add_option("--generations", opt.generations, "generation target")
        ->envname("SNNEVO_GENERATIONS");
    run->add_option("--strategy", opt.strategy, "inheritance strategy: mutation|crossover")
        ->envname("SNNEVO_STRATEGY");
    run->add_flag("--dump-trajectory", dump_trajectory,
                  "write per-step entity records to steps.txt");
    run->add_flag("--dump-phenotypes", dump_phenotypes,
                  "write per-generation phenotypes to phenotypes.jsonl");

    CLI::App* ensemble = app.add_subcommand("ensemble", "run a seeded ensemble of experiments");
    add_common(ensemble, true);
    ensemble->add_option("--seed", opt.seed, "base seed (members use base, base+1, ...)")
        ->envname("SNNEVO_SEED");
    ensemble->add_option("--generations", opt.generations, "generation target")
        ->envname("SNNEVO_GENERATIONS");
    ensemble->add_option("--strategy", opt.strategy, "inheritance strategy: mutation|crossover")
        ->envname("SNNEVO_STRATEGY");
    ensemble->add_option("--seeds", n_seeds, "number of ensemble members")
        ->check(CLI::PositiveNumber)
        ->envname("SNNEVO_SEEDS");
    ensemble->add_option("--jobs", jobs, "worker threads")
        ->check(CLI::PositiveNumber)
        ->envname("SNNEVO_JOBS");

    CLI::App* analyze = app.add_subcommand("analyze", "fit trajectories and summarize ensembles");
    add_common(analyze, false);
    analyze->add_option("--mode", mode, "single | ensemble | compare")
        ->check(CLI::IsMember({"single", "ensemble", "compare"}));
    analyze->add_option("inputs", inputs, "trajectory file / ensemble dir(s)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(opt, dump_trajectory, dump_phenotypes);
        if (ensemble->parsed()) return cmd_ensemble(opt, n_seeds, jobs);
        if (analyze->parsed()) return cmd_analyze(opt, mode, inputs);
        std::cerr << "no subcommand given\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
