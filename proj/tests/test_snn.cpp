#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "snnevo/rng.hpp"
#include "snnevo/snn.hpp"

using namespace snnevo;

namespace {

// Counts uniform draws while staying a drop-in generator.
struct CountingRng {
    Pcg32 inner = make_stream(1, 1);
    std::size_t draws = 0;
    double next_double() {
        ++draws;
        return inner.next_double();
    }
};

// Returns (0,1)-draws from a fixed list; used to script spontaneous firing.
struct StubRng {
    std::vector<double> values;
    std::size_t pos = 0;
    double next_double() { return values[pos++ % values.size()]; }
};

SnnParams default_params() {
    return SnnParams{};
}

// A 30-neuron network whose only nonzero weight feeds `charge` from sensory
// neuron 4 into neuron 0.
WeightMatrix single_input_weights(double charge) {
    WeightMatrix w(30);
    w.at(0, 4) = charge;
    return w;
}

std::vector<std::uint8_t> drive_on(std::size_t n, std::size_t index) {
    std::vector<std::uint8_t> d(n, 0);
    d[index] = 1;
    return d;
}

std::vector<std::uint8_t> no_drive(std::size_t n) {
    return std::vector<std::uint8_t>(n, 0);
}

} // namespace

TEST_CASE("suprathreshold charge fires the neuron and resets its potential") {
    const SnnParams params = default_params();
    const WeightMatrix w = single_input_weights(0.5);
    NeuronState state(30);
    Pcg32 rng = make_stream(1, kBotStreamBase);

    const auto drive = drive_on(30, 4);
    step_network(state, w, 0.0, params, drive, rng);
    CHECK(state.potential[0] == 0.5);
    CHECK(state.fired[0] == 1);
    // The driven sensory neuron itself does not spike, it only forwards
    // charge; its potential is held at zero while driven.
    CHECK(state.fired[4] == 0);
    CHECK(state.potential[4] == 0.0);

    const auto quiet = no_drive(30);
    step_network(state, w, 0.0, params, quiet, rng);
    CHECK(state.potential[0] == 0.0); // reset before integration
    CHECK(state.fired[0] == 0);
}

TEST_CASE("subthreshold charge decays geometrically, exact to the last bit") {
    const SnnParams params = default_params();
    const WeightMatrix w = single_input_weights(0.3);
    NeuronState state(30);
    Pcg32 rng = make_stream(1, kBotStreamBase);

    const auto drive = drive_on(30, 4);
    step_network(state, w, 0.0, params, drive, rng);
    CHECK(state.potential[0] == 0.3);
    CHECK(state.fired[0] == 0);

    const auto quiet = no_drive(30);
    double expected = 0.3;
    for (int step = 0; step < 200; ++step) {
        step_network(state, w, 0.0, params, quiet, rng);
        expected *= 1.0 - params.leak;
        REQUIRE(state.potential[0] == expected);
        REQUIRE(state.fired[0] == 0);
    }
    CHECK(state.potential[0] == doctest::Approx(0.3 * std::pow(0.99, 200)).epsilon(1e-12));
}

TEST_CASE("zero weights and zero spontaneous rate stay silent forever") {
    const SnnParams params = default_params();
    const WeightMatrix w(30);
    NeuronState state(30);
    Pcg32 rng = make_stream(2, kBotStreamBase);
    const auto quiet = no_drive(30);

    for (int step = 0; step < 1000; ++step) {
        step_network(state, w, 0.0, params, quiet, rng);
        for (int i = 0; i < 30; ++i) {
            REQUIRE(state.fired[i] == 0);
            REQUIRE(state.potential[i] == 0.0);
        }
    }
}

TEST_CASE("spontaneous rate of one fires every neuron every step") {
    const SnnParams params = default_params();
    const WeightMatrix w(30);
    NeuronState state(30);
    Pcg32 rng = make_stream(3, kBotStreamBase);
    const auto quiet = no_drive(30);

    for (int step = 0; step < 50; ++step) {
        step_network(state, w, 1.0, params, quiet, rng);
        for (int i = 0; i < 30; ++i) REQUIRE(state.fired[i] == 1);
    }
}

TEST_CASE("exactly one uniform draw per neuron per step") {
    const SnnParams params = default_params();
    const WeightMatrix w(30);
    NeuronState state(30);
    CountingRng rng;
    const auto quiet = no_drive(30);

    for (int step = 1; step <= 10; ++step) {
        step_network(state, w, 0.0, params, quiet, rng);
        REQUIRE(rng.draws == static_cast<std::size_t>(30 * step));
    }
}

TEST_CASE("threshold-only dynamics are deterministic") {
    const SnnParams params = default_params();
    Pcg32 wrng = make_stream(17, 0);
    WeightMatrix w(30);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j)
            if (i != j) w.at(i, j) = 2.0 * wrng.next_double() - 1.0;

    NeuronState s1(30), s2(30);
    Pcg32 r1 = make_stream(5, kBotStreamBase);
    Pcg32 r2 = make_stream(5, kBotStreamBase);
    const auto drive = drive_on(30, 6);
    for (int step = 0; step < 500; ++step) {
        step_network(s1, w, 0.0, params, drive, r1);
        step_network(s2, w, 0.0, params, drive, r2);
        REQUIRE(s1 == s2);
    }
}

TEST_CASE("spontaneous firing rate matches its probability") {
    // One-neuron network, no charge: over 1e6 steps the observed rate must
    // sit within three standard errors of b = 0.01.
    SnnParams params;
    params.n_neurons = 1;
    const WeightMatrix w(1);
    NeuronState state(1);
    Pcg32 rng = make_stream(11, kBotStreamBase);
    const auto quiet = no_drive(1);

    const int n = 1000000;
    const double b = 0.01;
    int fired = 0;
    for (int step = 0; step < n; ++step) {
        step_network(state, w, b, params, quiet, rng);
        fired += state.fired[0];
    }
    const double rate = static_cast<double>(fired) / n;
    const double std_err = std::sqrt(b * (1.0 - b) / n);
    CHECK(std::fabs(rate - b) < 3.0 * std_err);
}

TEST_CASE("inverted spontaneous flag restores the literal reading") {
    SnnParams params;
    params.n_neurons = 1;
    params.spontaneous_inverted = true;
    const WeightMatrix w(1);
    NeuronState state(1);
    Pcg32 rng = make_stream(11, kBotStreamBase);
    const auto quiet = no_drive(1);

    // With r > b and b = 0.01 nearly every step fires.
    int fired = 0;
    const int n = 10000;
    for (int step = 0; step < n; ++step) {
        step_network(state, w, 0.01, params, quiet, rng);
        fired += state.fired[0];
    }
    CHECK(fired > n * 0.97);
}

TEST_CASE("spontaneous spike resets the potential like a threshold spike") {
    SnnParams params;
    params.n_neurons = 2;
    WeightMatrix w(2);
    w.at(0, 1) = 0.2; // neuron 0 accumulates subthreshold charge from neuron 1

    NeuronState state(2);
    state.potential[0] = 0.35; // below threshold, nonzero

    // Scripted draws: step 1 fires neuron 0 spontaneously (r < b), neuron 1
    // stays quiet; step 2 draws never fire.
    StubRng rng{{0.001, 0.9, 0.9, 0.9}};
    const auto quiet = no_drive(2);

    step_network(state, w, 0.01, params, quiet, rng);
    CHECK(state.fired[0] == 1);
    CHECK(state.potential[0] > 0.0); // potential survives the spontaneous spike itself

    step_network(state, w, 0.01, params, quiet, rng);
    CHECK(state.potential[0] == 0.0); // reset on the following step
}

TEST_CASE("sensory drive contributes charge only while present") {
    const SnnParams params = default_params();
    const WeightMatrix w = single_input_weights(0.2);
    NeuronState state(30);
    Pcg32 rng = make_stream(21, kBotStreamBase);

    const auto drive = drive_on(30, 4);
    const auto quiet = no_drive(30);

    step_network(state, w, 0.0, params, drive, rng);
    CHECK(state.potential[0] == 0.2);
    step_network(state, w, 0.0, params, drive, rng);
    CHECK(state.potential[0] == doctest::Approx(0.2 * 0.99 + 0.2));
    step_network(state, w, 0.0, params, quiet, rng);
    CHECK(state.potential[0] == doctest::Approx((0.2 * 0.99 + 0.2) * 0.99));
}
