#pragma once

// Discrete-time leaky integrate-and-fire network.
//
// Per time-step, for every neuron i:
//
//   q_i      = sum_j w_ij * a_j          a = last step's spikes OR external drive
//   V_i'     = V_i + q_i - leak * V_i    V_i reset to 0 first if i spiked last step
//   spike_i  = V_i' > v_threshold, or spontaneously with probability b
//
// A neuron that spiked (threshold or spontaneous) has its potential reset to 0
// at the start of the next step. An externally driven neuron contributes to
// downstream charge through the spike vector only; its own potential is held
// at 0 for the duration of the driven step.
//
// Exactly n_neurons uniform draws are consumed per step, one per neuron in
// index order, regardless of the spontaneous rate, so spike trains are a pure
// function of (initial state, weights, drive sequence, rng stream).

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "snnevo/matrix.hpp"

namespace snnevo {

struct SnnParams {
    int n_neurons = 30;
    int n_motor = 4;    // motor block occupies indices [0, n_motor)
    int n_sensory = 6;  // sensory block occupies indices [n_motor, n_motor + n_sensory)
    double v_threshold = 0.4;
    double leak = 0.01; // fraction of potential lost per step
    // Literal reading of the published spontaneous-firing inequality (fires
    // when r > b). Kept for study; the default implements b as the firing
    // probability (fires when r < b).
    bool spontaneous_inverted = false;
};

inline void validate(const SnnParams& p, std::vector<std::string>& errors) {
    if (p.n_neurons < 1) errors.push_back("snn.n_neurons must be >= 1");
    if (p.n_motor < 4) errors.push_back("snn.n_motor must be >= 4 (four movement primitives)");
    if (p.n_sensory < 6) errors.push_back("snn.n_sensory must be >= 6 (nine-segment vision)");
    if (p.n_neurons < p.n_motor + p.n_sensory)
        errors.push_back("snn.n_neurons must be >= n_motor + n_sensory");
    if (!(p.v_threshold > 0.0)) errors.push_back("snn.v_threshold must be > 0");
    if (!(p.leak >= 0.0 && p.leak < 1.0)) errors.push_back("snn.leak must be in [0, 1)");
}

struct NeuronState {
    std::vector<double> potential;   // membrane potential per neuron
    std::vector<std::uint8_t> fired; // spike flags from the previous step

    NeuronState() = default;
    explicit NeuronState(std::size_t n) : potential(n, 0.0), fired(n, 0) {}

    bool operator==(const NeuronState& other) const = default;
};

// Advances the network one step in place. `drive` marks externally activated
// sensory neurons for this step; state.fired holds the new spike vector on
// return. b is the spontaneous firing probability per neuron per step.
template <class Rng>
void step_network(NeuronState& state, const WeightMatrix& weights, double b,
                  const SnnParams& params, std::span<const std::uint8_t> drive, Rng& rng) {
    const std::size_t n = weights.n;
    const double keep = 1.0 - params.leak;

    // Reset potentials of neurons that spiked last step, then apply the leak.
    for (std::size_t i = 0; i < n; ++i) {
        double v = state.fired[i] ? 0.0 : state.potential[i];
        state.potential[i] = v * keep;
    }

    // Deposit charge from every active sender: last step's spikes OR-ed with
    // the external drive.
    for (std::size_t j = 0; j < n; ++j) {
        if (!(state.fired[j] | drive[j])) continue;
        const double* col = weights.w.data() + j;
        for (std::size_t i = 0; i < n; ++i)
            state.potential[i] += col[i * n];
    }

    // Externally triggered neurons do not integrate while driven.
    for (std::size_t j = 0; j < n; ++j)
        if (drive[j]) state.potential[j] = 0.0;

    // Spike decision, one uniform draw per neuron in index order.
    for (std::size_t i = 0; i < n; ++i) {
        double r = rng.next_double();
        bool spontaneous = params.spontaneous_inverted ? (r > b) : (r < b);
        state.fired[i] = (state.potential[i] > params.v_threshold) || spontaneous;
    }
}

} // namespace snnevo
