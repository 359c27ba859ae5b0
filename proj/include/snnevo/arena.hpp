#pragma once

// The 2D foraging environment: bot kinematics, nine-segment vision, drifting
// food, reflective walls and capture detection. A single arena is strictly
// single-threaded; all entity updates within a step run in a fixed order so
// runs are reproducible bit for bit.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "snnevo/phenotype.hpp"
#include "snnevo/rng.hpp"
#include "snnevo/snn.hpp"

namespace snnevo {

struct ArenaConfig {
    double width = 500.0;
    double height = 500.0;
    int n_bots = 10;
    int n_food = 5;
    // Capture when squared bot-food distance is strictly below this. The
    // default matches a bot of circular area ~40 units^2 (radius ~3.57).
    double capture_dist_sq = 13.0;
    double bot_area = 40.0;
    double move_step = 1.0;  // translation per motor spike, units
    double turn_step = 0.1;  // rotation per motor spike, radians
    double food_speed_max = 1.0; // food speed drawn uniform on (0, max)
    // Upper edges of the three radial vision bands; the last one is the
    // vision range.
    std::array<double, 3> radial_bands = {30.0, 60.0, 100.0};
};

inline void validate(const ArenaConfig& c, std::vector<std::string>& errors) {
    if (!(c.width > 0.0)) errors.push_back("arena.width must be > 0");
    if (!(c.height > 0.0)) errors.push_back("arena.height must be > 0");
    if (c.n_bots < 1) errors.push_back("arena.n_bots must be >= 1");
    if (c.n_food < 1) errors.push_back("arena.n_food must be >= 1");
    if (!(c.capture_dist_sq > 0.0)) errors.push_back("arena.capture_dist_sq must be > 0");
    if (!(c.bot_area > 0.0)) errors.push_back("arena.bot_area must be > 0");
    if (!(c.move_step > 0.0)) errors.push_back("arena.move_step must be > 0");
    if (!(c.turn_step > 0.0)) errors.push_back("arena.turn_step must be > 0");
    if (!(c.food_speed_max >= 0.0)) errors.push_back("arena.food_speed_max must be >= 0");
    if (!(c.radial_bands[0] > 0.0 && c.radial_bands[0] < c.radial_bands[1] &&
          c.radial_bands[1] < c.radial_bands[2]))
        errors.push_back("arena.radial_bands must be positive and strictly increasing");
}

struct FoodState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0; // fixed heading, radians
    double speed = 0.0;   // units per time-step

    bool operator==(const FoodState& other) const = default;
};

struct BotState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    Phenotype phenotype;
    NeuronState neurons;
    std::int64_t captures = 0;   // lifetime capture count
    std::int64_t age = 1;        // time-steps lived, starts at 1 by construction
    int id = 0;
    std::int64_t birth_generation = 0;
    Pcg32 rng; // private stream for spontaneous-firing draws

    bool operator==(const BotState& other) const = default;
};

// One sighting report: three radial bands (near/mid/far) and the three
// angular thirds of the field of view. Multiple visible food items OR
// together.
struct VisionReport {
    std::array<bool, 3> radial = {false, false, false};
    std::array<bool, 3> angular = {false, false, false};

    bool any() const {
        return radial[0] || radial[1] || radial[2] || angular[0] || angular[1] || angular[2];
    }
    bool operator==(const VisionReport& other) const = default;
};

// Wraps an angle to [-pi, pi].
inline double wrap_angle(double a) {
    return std::remainder(a, kTwoPi);
}

// Band conventions: intervals are [lo, hi) except the outermost edge, which
// is inclusive — food at exactly the vision range or at exactly half the
// opening angle still counts as seen.
inline VisionReport sense(const BotState& bot, const std::vector<FoodState>& food,
                          const ArenaConfig& cfg) {
    VisionReport report;
    const double range = cfg.radial_bands[2];
    const double half_fov = bot.phenotype.visual_angle / 2.0;
    const double third = bot.phenotype.visual_angle / 6.0;
    for (const FoodState& f : food) {
        const double dx = f.x - bot.x;
        const double dy = f.y - bot.y;
        const double dist_sq = dx * dx + dy * dy;
        if (dist_sq > range * range) continue;
        const double offset = wrap_angle(std::atan2(dy, dx) - bot.heading);
        if (offset < -half_fov || offset > half_fov) continue;
        const double dist = std::sqrt(dist_sq);
        int radial = dist < cfg.radial_bands[0] ? 0 : (dist < cfg.radial_bands[1] ? 1 : 2);
        int angular = offset < -third ? 0 : (offset < third ? 1 : 2);
        report.radial[radial] = true;
        report.angular[angular] = true;
    }
    return report;
}

// Maps a report onto the sensory block: radial bands drive the first three
// sensory neurons, angular thirds the next three. With the default layout
// (4 motor neurons first) that is neurons 4-6 and 7-9.
inline void vision_to_sensory_drive(const VisionReport& report, const SnnParams& params,
                                    std::vector<std::uint8_t>& drive) {
    drive.assign(static_cast<std::size_t>(params.n_neurons), 0);
    const std::size_t base = static_cast<std::size_t>(params.n_motor);
    for (int k = 0; k < 3; ++k) {
        if (report.radial[k]) drive[base + k] = 1;
        if (report.angular[k]) drive[base + 3 + k] = 1;
    }
}

// Reflective walls: crossing a vertical wall maps the heading to pi - heading,
// a horizontal wall negates it; the position is clamped back inside. Applies
// to bots and food alike.
inline void reflect(double& x, double& y, double& heading, const ArenaConfig& cfg) {
    if (x < 0.0 || x > cfg.width) {
        heading = 3.14159265358979323846 - heading;
        x = x < 0.0 ? 0.0 : cfg.width;
    }
    if (y < 0.0 || y > cfg.height) {
        heading = -heading;
        y = y < 0.0 ? 0.0 : cfg.height;
    }
}

// Motor block: neuron 0 steps forward, 1 steps back, 2 and 3 rotate by one
// turn step clockwise / anti-clockwise. Motors apply in index order, so both
// translations use the pre-rotation heading. The move is then wall-reflected.
inline void apply_motor(BotState& bot, const std::vector<std::uint8_t>& fired,
                        const ArenaConfig& cfg) {
    if (fired[0]) {
        bot.x += std::cos(bot.heading) * cfg.move_step;
        bot.y += std::sin(bot.heading) * cfg.move_step;
    }
    if (fired[1]) {
        bot.x -= std::cos(bot.heading) * cfg.move_step;
        bot.y -= std::sin(bot.heading) * cfg.move_step;
    }
    if (fired[2]) bot.heading -= cfg.turn_step;
    if (fired[3]) bot.heading += cfg.turn_step;
    reflect(bot.x, bot.y, bot.heading, cfg);
}

// A physical capture: bot `bot_id` reached food slot `food_index`.
struct CaptureHit {
    int bot_id = 0;
    int food_index = 0;
};

// Every food item within capture range of some bot is captured by the nearest
// such bot (ties go to the lower id). A bot may capture several food items in
// one step. Hits are reported in food-index order.
inline std::vector<CaptureHit> detect_captures(const std::vector<BotState>& bots,
                                               const std::vector<FoodState>& food,
                                               const ArenaConfig& cfg) {
    std::vector<CaptureHit> hits;
    for (std::size_t fi = 0; fi < food.size(); ++fi) {
        const FoodState& f = food[fi];
        int best_id = -1;
        double best_dist_sq = cfg.capture_dist_sq;
        for (const BotState& bot : bots) { // population is kept in ascending id order
            const double dx = bot.x - f.x;
            const double dy = bot.y - f.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_dist_sq) {
                best_dist_sq = d2;
                best_id = bot.id;
            }
        }
        if (best_id >= 0) hits.push_back({best_id, static_cast<int>(fi)});
    }
    return hits;
}

// Fresh food item: position uniform over the arena, heading uniform over the
// circle, speed uniform on (0, food_speed_max). Consumes exactly four draws
// in that order.
template <class Rng>
FoodState spawn_food(Rng& rng, const ArenaConfig& cfg) {
    FoodState f;
    f.x = rng.next_double() * cfg.width;
    f.y = rng.next_double() * cfg.height;
    f.heading = rng.next_double() * kTwoPi;
    f.speed = rng.next_double() * cfg.food_speed_max;
    return f;
}

// Uniform pose over the arena; three draws (x, y, heading).
template <class Rng>
void random_pose(Rng& rng, const ArenaConfig& cfg, double& x, double& y, double& heading) {
    x = rng.next_double() * cfg.width;
    y = rng.next_double() * cfg.height;
    heading = rng.next_double() * kTwoPi;
}

struct CaptureEvent {
    std::uint64_t time_step = 0;
    int bot_id = 0;
    std::int64_t generation = 0; // generation counter at the moment of capture
    int food_index = 0;
};

struct ArenaState {
    ArenaConfig cfg;
    SnnParams snn;
    std::vector<BotState> bots; // ascending id order at all times
    std::vector<FoodState> food;
    Pcg32 env_rng; // spawns, poses, initial phenotypes, mutation draws
    std::uint64_t time_step = 0;
    std::int64_t generation = 0;
    int next_bot_id = 0;
    std::uint64_t experiment_seed = 0;

    std::vector<std::uint8_t> drive_scratch;

    const BotState* find_bot(int id) const {
        for (const BotState& b : bots)
            if (b.id == id) return &b;
        return nullptr;
    }
    BotState* find_bot(int id) {
        for (BotState& b : bots)
            if (b.id == id) return &b;
        return nullptr;
    }
};

// Creates a bot at a random pose with zeroed neuron state and its own
// spontaneous-firing stream. Consumes three env draws (the pose).
inline BotState make_bot(ArenaState& state, Phenotype phenotype, std::int64_t birth_generation) {
    BotState bot;
    bot.id = state.next_bot_id++;
    random_pose(state.env_rng, state.cfg, bot.x, bot.y, bot.heading);
    bot.phenotype = std::move(phenotype);
    bot.neurons = NeuronState(static_cast<std::size_t>(state.snn.n_neurons));
    bot.captures = 0;
    bot.age = 1;
    bot.birth_generation = birth_generation;
    bot.rng = make_stream(state.experiment_seed, kBotStreamBase + static_cast<std::uint64_t>(bot.id));
    return bot;
}

// Builds the initial arena: per bot a random pose then a random phenotype,
// then the initial food items. All environment draws come from the single
// env stream in this fixed order.
inline ArenaState init_arena(const ArenaConfig& cfg, const SnnParams& snn,
                             const EvolutionParams& evo, std::uint64_t seed) {
    ArenaState state;
    state.cfg = cfg;
    state.snn = snn;
    state.experiment_seed = seed;
    state.env_rng = make_stream(seed, kEnvStream);
    state.bots.reserve(static_cast<std::size_t>(cfg.n_bots));
    for (int i = 0; i < cfg.n_bots; ++i) {
        BotState bot;
        bot.id = state.next_bot_id++;
        random_pose(state.env_rng, cfg, bot.x, bot.y, bot.heading);
        bot.phenotype = random_phenotype(static_cast<std::size_t>(snn.n_neurons), evo, state.env_rng);
        bot.neurons = NeuronState(static_cast<std::size_t>(snn.n_neurons));
        bot.rng = make_stream(seed, kBotStreamBase + static_cast<std::uint64_t>(bot.id));
        state.bots.push_back(std::move(bot));
    }
    state.food.reserve(static_cast<std::size_t>(cfg.n_food));
    for (int i = 0; i < cfg.n_food; ++i)
        state.food.push_back(spawn_food(state.env_rng, cfg));
    return state;
}

// Advances the whole arena one time-step:
//   1. each bot in id order: sense -> network step -> motors -> reflection
//   2. all food drifts along its heading, reflecting off walls
//   3. captures are detected; captured food is respawned and the captor's
//      count incremented
//   4. ages and the time-step counter advance
// Capture events are returned for the caller to log and route to evolution;
// they are stamped with the step index on which they occurred.
inline std::vector<CaptureEvent> arena_step(ArenaState& state) {
    std::vector<CaptureEvent> events;

    for (BotState& bot : state.bots) {
        const VisionReport report = sense(bot, state.food, state.cfg);
        vision_to_sensory_drive(report, state.snn, state.drive_scratch);
        step_network(bot.neurons, bot.phenotype.weights, bot.phenotype.spontaneous_rate,
                     state.snn, state.drive_scratch, bot.rng);
        apply_motor(bot, bot.neurons.fired, state.cfg);
    }

    for (FoodState& f : state.food) {
        f.x += std::cos(f.heading) * f.speed;
        f.y += std::sin(f.heading) * f.speed;
        reflect(f.x, f.y, f.heading, state.cfg);
    }

    for (const CaptureHit& hit : detect_captures(state.bots, state.food, state.cfg)) {
        BotState* captor = state.find_bot(hit.bot_id);
        captor->captures += 1;
        state.food[static_cast<std::size_t>(hit.food_index)] = spawn_food(state.env_rng, state.cfg);
        events.push_back({state.time_step, hit.bot_id, state.generation, hit.food_index});
    }

    for (BotState& bot : state.bots)
        bot.age += 1;
    state.time_step += 1;

    return events;
}

} // namespace snnevo
