#pragma once

// File formats produced and consumed by the tools:
//
//   trajectory.csv   header "generation,T"; one row per windowed metric value
//   captures.csv     header "timestep,bot_id,generation"; one row per capture
//   metadata.json    full config snapshot + seed, enough to re-run bit-exactly
//   manifest.json    run inventory: config, seeds, outputs, failures, timing
//   fit.json         logistic fit parameters and uncertainties
//   fits.csv         one fit row per ensemble member
//   *_histogram.csv  header "bin_lo,bin_hi,count"
//   steps.txt        line-delimited per-step records (see step_dump_header)
//   phenotypes.jsonl one JSON object per completed generation
//
// Doubles are printed with shortest-round-trip formatting, so re-reading a
// file reproduces the in-memory values exactly and identical runs produce
// byte-identical files.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "snnevo/analysis.hpp"
#include "snnevo/arena.hpp"
#include "snnevo/config.hpp"
#include "snnevo/experiment.hpp"

namespace snnevo {

inline std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what) {}
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// --------------------------------------------------------------------------
// Trajectories and capture logs
// --------------------------------------------------------------------------

inline std::string trajectory_csv(const Trajectory& t) {
    std::string out = "generation,T\n";
    for (const TrajectoryPoint& pt : t.points) {
        out += std::to_string(pt.generation);
        out += ',';
        out += format_double(pt.t_value);
        out += '\n';
    }
    return out;
}

inline std::string capture_log_csv(const CaptureLog& log) {
    std::string out = "timestep,bot_id,generation\n";
    for (const CaptureRecord& r : log) {
        out += std::to_string(r.time_step);
        out += ',';
        out += std::to_string(r.bot_id);
        out += ',';
        out += std::to_string(r.generation);
        out += '\n';
    }
    return out;
}

inline std::vector<TrajectoryPoint> read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
    std::vector<TrajectoryPoint> points;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "generation,T")
                throw ParseError(path, line_no, "expected header \"generation,T\"");
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path, line_no, "missing comma");
        TrajectoryPoint pt;
        try {
            pt.generation = std::stoll(line.substr(0, comma));
            pt.t_value = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ParseError(path, line_no, "malformed row: " + line);
        }
        points.push_back(pt);
    }
    return points;
}

// --------------------------------------------------------------------------
// Metadata, fits, histograms, summary
// --------------------------------------------------------------------------

inline nlohmann::ordered_json metadata_json(const Config& cfg) {
    nlohmann::ordered_json j;
    j["tool"] = kToolVersion;
    j["rng_scheme"] = kRngScheme;
    j["seed"] = cfg.experiment.seed;
    j["strategy"] = to_string(cfg.evolution.strategy);
    j["config"] = to_json(cfg);
    return j;
}

inline nlohmann::ordered_json logistic_fit_json(const LogisticFit& fit) {
    nlohmann::ordered_json j;
    j["converged"] = fit.converged;
    j["amplitude"] = fit.amplitude;
    j["amplitude_err"] = fit.amplitude_err;
    j["steepness"] = fit.steepness;
    j["steepness_err"] = fit.steepness_err;
    j["inflection"] = fit.inflection;
    j["inflection_err"] = fit.inflection_err;
    j["convergence_point"] = fit.pedestal;
    j["convergence_point_err"] = fit.pedestal_err;
    j["initial_equilibrium"] = fit.amplitude + fit.pedestal;
    j["chi2"] = fit.chi2;
    j["n_points"] = fit.n_points;
    j["iterations"] = fit.iterations;
    j["message"] = fit.message;
    return j;
}

inline std::string fits_csv(const std::vector<std::uint64_t>& seeds,
                            const std::vector<LogisticFit>& fits) {
    std::string out =
        "seed,converged,amplitude,amplitude_err,steepness,steepness_err,"
        "inflection,inflection_err,convergence_point,convergence_point_err,chi2,n_points\n";
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const LogisticFit& f = fits[i];
        out += std::to_string(seeds[i]);
        out += f.converged ? ",1," : ",0,";
        out += format_double(f.amplitude) + ',' + format_double(f.amplitude_err) + ',';
        out += format_double(f.steepness) + ',' + format_double(f.steepness_err) + ',';
        out += format_double(f.inflection) + ',' + format_double(f.inflection_err) + ',';
        out += format_double(f.pedestal) + ',' + format_double(f.pedestal_err) + ',';
        out += format_double(f.chi2) + ',' + std::to_string(f.n_points) + '\n';
    }
    return out;
}

inline std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_lo,bin_hi,count\n";
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
        out += format_double(h.edge(k)) + ',' + format_double(h.edge(k + 1)) + ',' +
               format_double(h.counts[k]) + '\n';
    }
    return out;
}

inline nlohmann::ordered_json gaussian_fit_json(const GaussianFit& fit) {
    nlohmann::ordered_json j;
    j["converged"] = fit.converged;
    j["chi2"] = fit.chi2;
    j["n_bins"] = fit.n_bins;
    j["message"] = fit.message;
    j["components"] = nlohmann::ordered_json::array();
    for (const GaussianComponent& c : fit.components) {
        j["components"].push_back({{"area", c.area},
                                   {"area_err", c.area_err},
                                   {"mean", c.mean},
                                   {"mean_err", c.mean_err},
                                   {"sigma", c.sigma},
                                   {"sigma_err", c.sigma_err},
                                   {"weight", c.weight}});
    }
    return j;
}

inline nlohmann::ordered_json strategy_stats_json(const StrategyStats& s) {
    nlohmann::ordered_json j;
    j["strategy"] = s.name;
    j["n_trajectories"] = s.n_trajectories;
    j["n_converged"] = s.n_converged;
    j["inflection_sample"] = {{"n", s.inflection_sample.n},
                              {"mean", s.inflection_sample.mean},
                              {"stddev", s.inflection_sample.stddev},
                              {"std_error", s.inflection_sample.std_error}};
    j["convergence_sample"] = {{"n", s.convergence_sample.n},
                               {"mean", s.convergence_sample.mean},
                               {"stddev", s.convergence_sample.stddev},
                               {"std_error", s.convergence_sample.std_error}};
    j["inflection_fit"] = gaussian_fit_json(s.inflection_fit);
    j["convergence_one_component"] = gaussian_fit_json(s.convergence_modes.one);
    j["convergence_two_component"] = gaussian_fit_json(s.convergence_modes.two);
    j["convergence_bimodal"] = s.convergence_modes.bimodal;
    j["suboptimal_fraction"] = s.suboptimal_fraction;
    return j;
}

namespace detail {

inline std::string gaussian_cell(const GaussianFit& fit, const SampleStats& fallback) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(0);
    if (fit.converged && !fit.components.empty())
        os << fit.components[0].mean << " +- " << fit.components[0].sigma;
    else
        os << fallback.mean << " +- " << fallback.stddev << " (sample)";
    return os.str();
}

} // namespace detail

// Human-readable comparison table: one row per strategy with the fitted
// inflection- and convergence-point distributions.
inline std::string comparison_table(const StrategyComparison& cmp) {
    std::ostringstream os;
    os << "Strategy                 Inflection Point         Convergence Point\n";
    os << "                         (generations)            (time-steps)\n";
    os << "-----------------------------------------------------------------------\n";
    for (const StrategyStats* s : {&cmp.first, &cmp.second}) {
        std::string conv;
        if (s->convergence_modes.bimodal) {
            const auto& comps = s->convergence_modes.two.components;
            std::ostringstream c;
            c.setf(std::ios::fixed);
            c.precision(0);
            c << comps[0].mean << " +- " << comps[0].sigma << " and " << comps[1].mean << " +- "
              << comps[1].sigma;
            conv = c.str();
        } else {
            conv = detail::gaussian_cell(s->convergence_modes.one, s->convergence_sample);
        }
        os << s->name;
        for (std::size_t i = s->name.size(); i < 25; ++i) os << ' ';
        std::string infl = detail::gaussian_cell(s->inflection_fit, s->inflection_sample);
        os << infl;
        for (std::size_t i = infl.size(); i < 25; ++i) os << ' ';
        os << conv << '\n';
    }
    os << "-----------------------------------------------------------------------\n";
    os.setf(std::ios::fixed);
    os.precision(1);
    os << "speedup (1 - g0_" << cmp.second.name << " / g0_" << cmp.first.name
       << "): " << 100.0 * cmp.speedup << "%\n";
    if (cmp.second.convergence_modes.bimodal) {
        os << "sub-optimal convergence fraction (" << cmp.second.name
           << "): " << 100.0 * cmp.second.suboptimal_fraction << "%\n";
    }
    for (const std::string& w : cmp.warnings) os << "warning: " << w << '\n';
    return os.str();
}

inline std::string comparison_csv(const StrategyComparison& cmp) {
    std::string out =
        "strategy,n_trajectories,n_converged,inflection_mean,inflection_sigma,"
        "convergence_mean,convergence_sigma,bimodal,minor_mean,minor_sigma,"
        "suboptimal_fraction,speedup\n";
    for (const StrategyStats* s : {&cmp.first, &cmp.second}) {
        double infl_mean = s->inflection_sample.mean, infl_sigma = s->inflection_sample.stddev;
        if (s->inflection_fit.converged && !s->inflection_fit.components.empty()) {
            infl_mean = s->inflection_fit.components[0].mean;
            infl_sigma = s->inflection_fit.components[0].sigma;
        }
        double conv_mean = s->convergence_sample.mean, conv_sigma = s->convergence_sample.stddev;
        double minor_mean = 0.0, minor_sigma = 0.0;
        if (s->convergence_modes.bimodal) {
            conv_mean = s->convergence_modes.two.components[0].mean;
            conv_sigma = s->convergence_modes.two.components[0].sigma;
            minor_mean = s->convergence_modes.two.components[1].mean;
            minor_sigma = s->convergence_modes.two.components[1].sigma;
        } else if (s->convergence_modes.one.converged &&
                   !s->convergence_modes.one.components.empty()) {
            conv_mean = s->convergence_modes.one.components[0].mean;
            conv_sigma = s->convergence_modes.one.components[0].sigma;
        }
        out += s->name + ',' + std::to_string(s->n_trajectories) + ',' +
               std::to_string(s->n_converged) + ',' + format_double(infl_mean) + ',' +
               format_double(infl_sigma) + ',' + format_double(conv_mean) + ',' +
               format_double(conv_sigma) + ',' + (s->convergence_modes.bimodal ? "1," : "0,") +
               format_double(minor_mean) + ',' + format_double(minor_sigma) + ',' +
               format_double(s->suboptimal_fraction) + ',' + format_double(cmp.speedup) + '\n';
    }
    return out;
}

// --------------------------------------------------------------------------
// Per-step and per-generation dumps
// --------------------------------------------------------------------------

inline std::string step_dump_header() {
    return "# timestep,kind,id,x,y,heading,spikes\n";
}

// One line per entity per time-step; bots report their spike count for the
// step, food rows leave the field empty.
inline void append_step_dump(std::string& out, const ArenaState& state) {
    for (const BotState& bot : state.bots) {
        int spikes = 0;
        for (std::uint8_t f : bot.neurons.fired) spikes += f;
        out += std::to_string(state.time_step - 1); // counter already advanced
        out += ",bot,";
        out += std::to_string(bot.id);
        out += ',';
        out += format_double(bot.x);
        out += ',';
        out += format_double(bot.y);
        out += ',';
        out += format_double(bot.heading);
        out += ',';
        out += std::to_string(spikes);
        out += '\n';
    }
    for (std::size_t i = 0; i < state.food.size(); ++i) {
        const FoodState& f = state.food[i];
        out += std::to_string(state.time_step - 1);
        out += ",food,";
        out += std::to_string(i);
        out += ',';
        out += format_double(f.x);
        out += ',';
        out += format_double(f.y);
        out += ',';
        out += format_double(f.heading);
        out += ",\n";
    }
}

// One JSON object per completed generation with the full phenotype of every
// living bot (weights row-major).
inline std::string phenotype_dump_line(const ArenaState& state) {
    nlohmann::ordered_json j;
    j["generation"] = state.generation;
    j["time_step"] = state.time_step;
    auto bots = nlohmann::ordered_json::array();
    for (const BotState& b : state.bots) {
        bots.push_back({{"id", b.id},
                        {"birth_generation", b.birth_generation},
                        {"captures", b.captures},
                        {"age", b.age},
                        {"spontaneous_rate", b.phenotype.spontaneous_rate},
                        {"visual_angle", b.phenotype.visual_angle},
                        {"weights", b.phenotype.weights.w}});
    }
    j["bots"] = std::move(bots);
    return j.dump() + "\n";
}

// --------------------------------------------------------------------------
// Run manifest
// --------------------------------------------------------------------------

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunManifest {
    Config config;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> outputs;
    std::vector<std::pair<std::uint64_t, std::string>> failures; // seed, error
    std::string started;
    std::string finished;
};

inline nlohmann::ordered_json manifest_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["tool"] = kToolVersion;
    j["rng_scheme"] = kRngScheme;
    j["started_utc"] = m.started;
    j["finished_utc"] = m.finished;
    j["seeds"] = m.seeds;
    j["config"] = to_json(m.config);
    j["outputs"] = m.outputs;
    auto failures = nlohmann::ordered_json::array();
    for (const auto& [seed, error] : m.failures)
        failures.push_back({{"seed", seed}, {"error", error}});
    j["failures"] = std::move(failures);
    return j;
}

} // namespace snnevo
