#pragma once

// Experiment driver: runs one evolutionary experiment to a generation target,
// reduces its capture log to the learning metric T, and fans out seeded
// ensembles over worker threads. A trajectory is a pure function of
// (seed, config); ensemble results do not depend on the degree of
// parallelism.

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "snnevo/arena.hpp"
#include "snnevo/config.hpp"
#include "snnevo/evolution.hpp"

namespace snnevo {

struct CaptureRecord {
    std::uint64_t time_step = 0;
    int bot_id = 0;
    std::int64_t generation = 0;
};

using CaptureLog = std::vector<CaptureRecord>;

struct TrajectoryPoint {
    std::int64_t generation = 0;
    double t_value = 0.0; // trailing-window mean of the two-capture interval

    bool operator==(const TrajectoryPoint& other) const = default;
};

struct Trajectory {
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::mutation;
    std::vector<TrajectoryPoint> points;

    bool operator==(const Trajectory& other) const = default;
};

// The learning metric. Capture events pair up two at a time irrespective of
// which bot captured: interval p is the time between capture 2p and capture
// 2p+2, attributed to the generation during which its closing capture
// occurred. T is the trailing mean of the intervals attributed to the last
// `window` generations, and the series is indexed by generation, so the axis
// matches the strategy's own generation counter (under pure mutation a
// generation is one capture, under crossover it is two). Values only appear
// once a full window of history exists; there is no padding.
inline std::vector<TrajectoryPoint> compute_capture_metric(const CaptureLog& log, int window) {
    std::vector<TrajectoryPoint> series;
    if (window < 1 || log.size() < 3) return series;

    std::vector<std::uint64_t> intervals;
    std::vector<std::int64_t> closing_generation;
    for (std::size_t m = 0; m + 2 < log.size(); m += 2) {
        intervals.push_back(log[m + 2].time_step - log[m].time_step);
        closing_generation.push_back(log[m + 2].generation);
    }

    const std::int64_t w = window;
    const std::int64_t first = log.front().generation;
    std::uint64_t sum = 0;
    std::size_t lo = 0;
    for (std::size_t p = 0; p < intervals.size(); ++p) {
        sum += intervals[p];
        while (closing_generation[lo] <= closing_generation[p] - w) sum -= intervals[lo++];
        if (closing_generation[p] - first < w - 1) continue;
        // One point per generation: a multi-capture step can close two
        // intervals in the same generation, in which case the later value
        // stands.
        const TrajectoryPoint pt{closing_generation[p],
                                 static_cast<double>(sum) / static_cast<double>(p - lo + 1)};
        if (!series.empty() && series.back().generation == pt.generation)
            series.back() = pt;
        else
            series.push_back(pt);
    }
    return series;
}

// Raised when the stall guard trips: far more steps without a capture than
// any plausible learning plateau.
class SimulationStall : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentResult {
    Trajectory trajectory;
    CaptureLog log;
    std::vector<BotState> final_population;
    std::uint64_t total_steps = 0;
    std::int64_t generations = 0;
    std::int64_t dropped_events = 0;
};

// Optional observation hooks; both run synchronously on the experiment's
// thread. `on_step` fires after every arena step, `on_generation` after every
// completed evolutionary event.
struct RunHooks {
    std::function<void(const ArenaState&, std::span<const CaptureEvent>)> on_step;
    std::function<void(const ArenaState&)> on_generation;
};

inline ExperimentResult run_experiment(const Config& cfg, const RunHooks& hooks = {}) {
    ArenaState state = init_arena(cfg.arena, cfg.snn, cfg.evolution, cfg.experiment.seed);
    EvolutionEngine evolution(cfg.evolution);

    ExperimentResult result;
    std::uint64_t steps_since_capture = 0;

    while (state.generation < cfg.experiment.max_generations) {
        const std::vector<CaptureEvent> events = arena_step(state);
        if (hooks.on_step) hooks.on_step(state, events);

        if (events.empty()) {
            if (++steps_since_capture >= cfg.experiment.stall_guard_steps)
                throw SimulationStall(
                    "no capture in " + std::to_string(steps_since_capture) +
                    " consecutive steps (generation " + std::to_string(state.generation) +
                    ", time-step " + std::to_string(state.time_step) + "); aborting run");
        } else {
            steps_since_capture = 0;
            for (const CaptureEvent& ev : events) {
                result.log.push_back({ev.time_step, ev.bot_id, ev.generation});
                if (evolution.on_capture(state, ev.bot_id) > 0 && hooks.on_generation)
                    hooks.on_generation(state);
            }
        }
    }

    result.trajectory.seed = cfg.experiment.seed;
    result.trajectory.strategy = cfg.evolution.strategy;
    result.trajectory.points = compute_capture_metric(result.log, cfg.experiment.window);
    result.final_population = std::move(state.bots);
    result.total_steps = state.time_step;
    result.generations = state.generation;
    result.dropped_events = evolution.dropped_events();
    return result;
}

struct EnsembleMember {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    ExperimentResult result;
};

// Runs `n_seeds` independent experiments with seeds base, base+1, ... on up
// to `jobs` worker threads. A member that aborts is recorded with its error
// and the rest of the ensemble continues. Members come back in seed order
// regardless of scheduling.
inline std::vector<EnsembleMember> run_ensemble(const Config& base, int n_seeds, int jobs) {
    if (n_seeds < 1) throw std::invalid_argument("run_ensemble: n_seeds must be >= 1");
    if (jobs < 1) throw std::invalid_argument("run_ensemble: jobs must be >= 1");

    std::vector<EnsembleMember> members(static_cast<std::size_t>(n_seeds));
    std::atomic<int> next{0};

    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_seeds) return;
            Config cfg = base;
            cfg.experiment.seed = base.experiment.seed + static_cast<std::uint64_t>(i);
            EnsembleMember& member = members[static_cast<std::size_t>(i)];
            member.seed = cfg.experiment.seed;
            try {
                member.result = run_experiment(cfg);
                member.ok = true;
            } catch (const std::exception& e) {
                member.ok = false;
                member.error = e.what();
            }
        }
    };

    const int n_threads = std::min(jobs, n_seeds);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return members;
}

} // namespace snnevo
