#pragma once

// Aggregate run configuration, mirrored one-to-one by the JSON config file.
// Every constant of the simulation is a named, overridable key; the defaults
// reproduce the reference setup. Unknown keys are rejected by name so that a
// typo cannot silently fall back to a default.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "snnevo/arena.hpp"
#include "snnevo/phenotype.hpp"
#include "snnevo/snn.hpp"

namespace snnevo {

inline constexpr const char* kToolVersion = "snnevo 1.0.0";

struct ExperimentParams {
    std::uint64_t seed = 4;
    std::int64_t max_generations = 10000;
    int window = 50; // trailing generations averaged into the learning metric
    // Abort threshold: this many consecutive steps without a capture is
    // treated as a hang rather than slow learning.
    std::uint64_t stall_guard_steps = 10000000;
};

struct AnalysisParams {
    double inflection_bin_width = 150.0;  // generations
    double convergence_bin_width = 100.0; // time-steps
    // Two-component verdict: accept when chi2 drops below this fraction of
    // the one-component chi2 and the minor weight exceeds the floor.
    double bimodal_chi2_ratio = 0.5;
    double bimodal_min_weight = 0.10;
    double init_slope = 0.02; // starting guess for the logistic slope
};

struct Config {
    ArenaConfig arena;
    SnnParams snn;
    EvolutionParams evolution;
    ExperimentParams experiment;
    AnalysisParams analysis;
};

inline void validate(const ExperimentParams& p, std::vector<std::string>& errors) {
    if (p.window < 1) errors.push_back("experiment.window must be >= 1");
    if (p.max_generations < 0) errors.push_back("experiment.max_generations must be >= 0");
    if (p.stall_guard_steps < 1) errors.push_back("experiment.stall_guard_steps must be >= 1");
}

inline void validate(const AnalysisParams& p, std::vector<std::string>& errors) {
    if (!(p.inflection_bin_width > 0.0)) errors.push_back("analysis.inflection_bin_width must be > 0");
    if (!(p.convergence_bin_width > 0.0)) errors.push_back("analysis.convergence_bin_width must be > 0");
    if (!(p.bimodal_chi2_ratio > 0.0 && p.bimodal_chi2_ratio <= 1.0))
        errors.push_back("analysis.bimodal_chi2_ratio must be in (0, 1]");
    if (!(p.bimodal_min_weight >= 0.0 && p.bimodal_min_weight < 0.5))
        errors.push_back("analysis.bimodal_min_weight must be in [0, 0.5)");
}

// Collects every constraint violation; an empty result means the config is
// runnable.
inline std::vector<std::string> validate(const Config& cfg) {
    std::vector<std::string> errors;
    validate(cfg.arena, errors);
    validate(cfg.snn, errors);
    validate(cfg.evolution, errors);
    validate(cfg.experiment, errors);
    validate(cfg.analysis, errors);
    if (cfg.evolution.strategy == Strategy::crossover_with_mutation && cfg.snn.n_neurons % 2 != 0)
        errors.push_back("snn.n_neurons must be even under the crossover strategy");
    return errors;
}

inline nlohmann::ordered_json to_json(const Config& cfg) {
    nlohmann::ordered_json j;
    j["arena"] = {
        {"width", cfg.arena.width},
        {"height", cfg.arena.height},
        {"n_bots", cfg.arena.n_bots},
        {"n_food", cfg.arena.n_food},
        {"capture_dist_sq", cfg.arena.capture_dist_sq},
        {"bot_area", cfg.arena.bot_area},
        {"move_step", cfg.arena.move_step},
        {"turn_step", cfg.arena.turn_step},
        {"food_speed_max", cfg.arena.food_speed_max},
        {"radial_bands", cfg.arena.radial_bands},
    };
    j["snn"] = {
        {"n_neurons", cfg.snn.n_neurons},
        {"n_motor", cfg.snn.n_motor},
        {"n_sensory", cfg.snn.n_sensory},
        {"v_threshold", cfg.snn.v_threshold},
        {"leak", cfg.snn.leak},
        {"spontaneous_inverted", cfg.snn.spontaneous_inverted},
    };
    j["evolution"] = {
        {"mutation_sigma", cfg.evolution.mutation_sigma},
        {"visual_mutation_sigma", cfg.evolution.visual_mutation_sigma},
        {"strategy", to_string(cfg.evolution.strategy)},
        {"distinct_parents", cfg.evolution.distinct_parents},
        {"init_weight_half_range", cfg.evolution.init_weight_half_range},
        {"init_spontaneous_rate", cfg.evolution.init_spontaneous_rate},
        {"init_visual_angle", cfg.evolution.init_visual_angle},
    };
    j["experiment"] = {
        {"seed", cfg.experiment.seed},
        {"max_generations", cfg.experiment.max_generations},
        {"window", cfg.experiment.window},
        {"stall_guard_steps", cfg.experiment.stall_guard_steps},
    };
    j["analysis"] = {
        {"inflection_bin_width", cfg.analysis.inflection_bin_width},
        {"convergence_bin_width", cfg.analysis.convergence_bin_width},
        {"bimodal_chi2_ratio", cfg.analysis.bimodal_chi2_ratio},
        {"bimodal_min_weight", cfg.analysis.bimodal_min_weight},
        {"init_slope", cfg.analysis.init_slope},
    };
    return j;
}

namespace detail {

template <class T>
void read_key(const nlohmann::json& section, const std::string& section_name,
              const char* key, T& out, std::vector<std::string>& errors) {
    if (!section.contains(key)) return;
    try {
        out = section.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        errors.push_back("config key has wrong type: " + section_name + "." + key);
    }
}

inline void check_known_keys(const nlohmann::json& section, const std::string& section_name,
                             std::initializer_list<const char*> known,
                             std::vector<std::string>& errors) {
    for (auto it = section.begin(); it != section.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok) errors.push_back("unknown config key: " + section_name + "." + it.key());
    }
}

} // namespace detail

// Applies a parsed JSON document on top of `cfg`. Missing keys keep their
// current values; unknown keys and type mismatches are reported by name.
inline std::vector<std::string> apply_json(Config& cfg, const nlohmann::json& j) {
    std::vector<std::string> errors;
    if (!j.is_object()) return {"config root must be a JSON object"};

    static const std::initializer_list<const char*> sections = {"arena", "snn", "evolution",
                                                                "experiment", "analysis"};
    detail::check_known_keys(j, "(root)", sections, errors);

    using detail::read_key;
    if (j.contains("arena")) {
        const auto& s = j.at("arena");
        detail::check_known_keys(s, "arena",
                                 {"width", "height", "n_bots", "n_food", "capture_dist_sq",
                                  "bot_area", "move_step", "turn_step", "food_speed_max",
                                  "radial_bands"},
                                 errors);
        read_key(s, "arena", "width", cfg.arena.width, errors);
        read_key(s, "arena", "height", cfg.arena.height, errors);
        read_key(s, "arena", "n_bots", cfg.arena.n_bots, errors);
        read_key(s, "arena", "n_food", cfg.arena.n_food, errors);
        read_key(s, "arena", "capture_dist_sq", cfg.arena.capture_dist_sq, errors);
        read_key(s, "arena", "bot_area", cfg.arena.bot_area, errors);
        read_key(s, "arena", "move_step", cfg.arena.move_step, errors);
        read_key(s, "arena", "turn_step", cfg.arena.turn_step, errors);
        read_key(s, "arena", "food_speed_max", cfg.arena.food_speed_max, errors);
        read_key(s, "arena", "radial_bands", cfg.arena.radial_bands, errors);
    }
    if (j.contains("snn")) {
        const auto& s = j.at("snn");
        detail::check_known_keys(s, "snn",
                                 {"n_neurons", "n_motor", "n_sensory", "v_threshold", "leak",
                                  "spontaneous_inverted"},
                                 errors);
        read_key(s, "snn", "n_neurons", cfg.snn.n_neurons, errors);
        read_key(s, "snn", "n_motor", cfg.snn.n_motor, errors);
        read_key(s, "snn", "n_sensory", cfg.snn.n_sensory, errors);
        read_key(s, "snn", "v_threshold", cfg.snn.v_threshold, errors);
        read_key(s, "snn", "leak", cfg.snn.leak, errors);
        read_key(s, "snn", "spontaneous_inverted", cfg.snn.spontaneous_inverted, errors);
    }
    if (j.contains("evolution")) {
        const auto& s = j.at("evolution");
        detail::check_known_keys(s, "evolution",
                                 {"mutation_sigma", "visual_mutation_sigma", "strategy",
                                  "distinct_parents", "init_weight_half_range",
                                  "init_spontaneous_rate", "init_visual_angle"},
                                 errors);
        read_key(s, "evolution", "mutation_sigma", cfg.evolution.mutation_sigma, errors);
        read_key(s, "evolution", "visual_mutation_sigma", cfg.evolution.visual_mutation_sigma,
                 errors);
        if (s.contains("strategy")) {
            std::string name;
            read_key(s, "evolution", "strategy", name, errors);
            if (name == "mutation")
                cfg.evolution.strategy = Strategy::mutation;
            else if (name == "crossover")
                cfg.evolution.strategy = Strategy::crossover_with_mutation;
            else
                errors.push_back("evolution.strategy must be \"mutation\" or \"crossover\"");
        }
        read_key(s, "evolution", "distinct_parents", cfg.evolution.distinct_parents, errors);
        read_key(s, "evolution", "init_weight_half_range", cfg.evolution.init_weight_half_range,
                 errors);
        read_key(s, "evolution", "init_spontaneous_rate", cfg.evolution.init_spontaneous_rate,
                 errors);
        read_key(s, "evolution", "init_visual_angle", cfg.evolution.init_visual_angle, errors);
    }
    if (j.contains("experiment")) {
        const auto& s = j.at("experiment");
        detail::check_known_keys(
            s, "experiment", {"seed", "max_generations", "window", "stall_guard_steps"}, errors);
        read_key(s, "experiment", "seed", cfg.experiment.seed, errors);
        read_key(s, "experiment", "max_generations", cfg.experiment.max_generations, errors);
        read_key(s, "experiment", "window", cfg.experiment.window, errors);
        read_key(s, "experiment", "stall_guard_steps", cfg.experiment.stall_guard_steps, errors);
    }
    if (j.contains("analysis")) {
        const auto& s = j.at("analysis");
        detail::check_known_keys(s, "analysis",
                                 {"inflection_bin_width", "convergence_bin_width",
                                  "bimodal_chi2_ratio", "bimodal_min_weight", "init_slope"},
                                 errors);
        read_key(s, "analysis", "inflection_bin_width", cfg.analysis.inflection_bin_width, errors);
        read_key(s, "analysis", "convergence_bin_width", cfg.analysis.convergence_bin_width,
                 errors);
        read_key(s, "analysis", "bimodal_chi2_ratio", cfg.analysis.bimodal_chi2_ratio, errors);
        read_key(s, "analysis", "bimodal_min_weight", cfg.analysis.bimodal_min_weight, errors);
        read_key(s, "analysis", "init_slope", cfg.analysis.init_slope, errors);
    }
    return errors;
}

// Loads a config file on top of the defaults. Parse failures and offending
// keys come back in `errors`; validation is a separate step.
inline bool load_config_file(const std::string& path, Config& cfg,
                             std::vector<std::string>& errors) {
    std::ifstream in(path);
    if (!in) {
        errors.push_back("cannot open config file: " + path);
        return false;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        errors.push_back(std::string("config parse error: ") + e.what());
        return false;
    }
    auto key_errors = apply_json(cfg, j);
    errors.insert(errors.end(), key_errors.begin(), key_errors.end());
    return key_errors.empty();
}

} // namespace snnevo
