#pragma once

// Capture-triggered evolution: selection of the captor(s), reproduction by
// mutation or by column-swap crossover plus mutation, and fitness-based
// elimination that keeps the population size constant.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "snnevo/arena.hpp"
#include "snnevo/phenotype.hpp"

namespace snnevo {

// Lifetime captures per time-step of age. Age starts at 1, so this is always
// defined.
inline double fitness(const BotState& bot) {
    return static_cast<double>(bot.captures) / static_cast<double>(bot.age);
}

namespace detail {

// Elimination order: lowest fitness first; among equals the oldest goes,
// then the lowest id. Newborns from the current event are excluded by the
// caller before this runs.
inline bool eliminate_before(const BotState& a, const BotState& b) {
    const double fa = fitness(a);
    const double fb = fitness(b);
    if (fa != fb) return fa < fb;
    if (a.age != b.age) return a.age > b.age;
    return a.id < b.id;
}

inline void remove_worst(std::vector<BotState>& bots, int protected_lo, int protected_hi) {
    std::size_t worst = bots.size();
    for (std::size_t i = 0; i < bots.size(); ++i) {
        if (bots[i].id >= protected_lo && bots[i].id <= protected_hi) continue;
        if (worst == bots.size() || eliminate_before(bots[i], bots[worst])) worst = i;
    }
    bots.erase(bots.begin() + static_cast<std::ptrdiff_t>(worst));
}

} // namespace detail

// Runs the per-capture evolutionary procedure against the arena population.
// Stateful only through the crossover parent queue.
class EvolutionEngine {
public:
    explicit EvolutionEngine(EvolutionParams params) : params_(std::move(params)) {}

    const EvolutionParams& params() const { return params_; }
    std::size_t queued_parents() const { return queue_.size(); }

    // Processes one capture event. Returns the number of generations
    // completed (0 while a crossover pair is waiting, otherwise 1).
    int on_capture(ArenaState& state, int captor_id) {
        if (state.find_bot(captor_id) == nullptr) {
            // The captor was eliminated by an earlier event on the same
            // time-step; its genes are gone, so the event cannot reproduce.
            ++dropped_events_;
            return 0;
        }
        if (params_.strategy == Strategy::mutation)
            return mutation_event(state, captor_id);
        return crossover_event(state, captor_id);
    }

    // Capture events that could not trigger reproduction because the captor
    // had already been eliminated within the same step.
    std::int64_t dropped_events() const { return dropped_events_; }

private:
    int mutation_event(ArenaState& state, int captor_id) {
        Phenotype child_genes = mutate(state.find_bot(captor_id)->phenotype, params_, state.env_rng);
        state.generation += 1;
        BotState child = make_bot(state, std::move(child_genes), state.generation);
        const int child_id = child.id;
        state.bots.push_back(std::move(child));
        detail::remove_worst(state.bots, child_id, child_id);
        return 1;
    }

    int crossover_event(ArenaState& state, int captor_id) {
        if (params_.distinct_parents && !queue_.empty() && queue_.front() == captor_id)
            return 0;
        queue_.push_back(captor_id);
        if (queue_.size() < 2) return 0;

        // Parents are alive here: eliminations only happen when a pair
        // completes, and the queue empties at that point.
        const Phenotype& p1 = state.find_bot(queue_[0])->phenotype;
        const Phenotype& p2 = state.find_bot(queue_[1])->phenotype;
        auto [c1, c2] = crossover(p1, p2);
        c1 = mutate(c1, params_, state.env_rng);
        c2 = mutate(c2, params_, state.env_rng);
        queue_.clear();

        state.generation += 1;
        BotState child1 = make_bot(state, std::move(c1), state.generation);
        BotState child2 = make_bot(state, std::move(c2), state.generation);
        const int lo = child1.id;
        const int hi = child2.id;
        state.bots.push_back(std::move(child1));
        state.bots.push_back(std::move(child2));
        detail::remove_worst(state.bots, lo, hi);
        detail::remove_worst(state.bots, lo, hi);
        return 1;
    }

    EvolutionParams params_;
    std::vector<int> queue_;
    std::int64_t dropped_events_ = 0;
};

} // namespace snnevo
