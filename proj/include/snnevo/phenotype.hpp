#pragma once

// The evolvable genome of a bot: synaptic weight matrix, spontaneous firing
// rate and visual opening angle. Genotype and phenotype are identical.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "snnevo/matrix.hpp"
#include "snnevo/rng.hpp"

namespace snnevo {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Lower clamp for the visual angle; stands in for the open bound of (0, 2*pi].
inline constexpr double kMinVisualAngle = 1e-9;

struct Phenotype {
    WeightMatrix weights;
    double spontaneous_rate = 0.0; // firing probability per neuron per step, in [0, 1]
    double visual_angle = 0.0;     // field-of-view opening angle, radians, in (0, 2*pi]

    bool operator==(const Phenotype& other) const = default;
};

enum class Strategy { mutation, crossover_with_mutation };

inline const char* to_string(Strategy s) {
    return s == Strategy::mutation ? "mutation" : "crossover";
}

struct EvolutionParams {
    double mutation_sigma = 0.05;         // std-dev of weight and rate mutations
    double visual_mutation_sigma = 0.008; // std-dev of visual-angle mutations
    Strategy strategy = Strategy::mutation;
    // When true, the crossover parent queue rejects a bot already waiting in
    // it; by default a double captor may pair with itself.
    bool distinct_parents = false;
    // Initial phenotype distribution: off-diagonal weights uniform on
    // (-init_weight_half_range, +init_weight_half_range), fixed starting
    // spontaneous rate and visual angle. The starting angle is deliberately
    // narrower than the evolved field of view: vision-guided hunting then has
    // to be discovered by evolution rather than being wired in from step one,
    // which is what makes the learning curves punctuated.
    double init_weight_half_range = 0.5;
    double init_spontaneous_rate = 0.01;
    double init_visual_angle = 1.2;
};

inline void validate(const EvolutionParams& p, std::vector<std::string>& errors) {
    if (!(p.mutation_sigma >= 0.0)) errors.push_back("evolution.mutation_sigma must be >= 0");
    if (!(p.visual_mutation_sigma >= 0.0))
        errors.push_back("evolution.visual_mutation_sigma must be >= 0");
    if (!(p.init_weight_half_range >= 0.0))
        errors.push_back("evolution.init_weight_half_range must be >= 0");
    if (!(p.init_spontaneous_rate >= 0.0 && p.init_spontaneous_rate <= 1.0))
        errors.push_back("evolution.init_spontaneous_rate must be in [0, 1]");
    if (!(p.init_visual_angle > 0.0 && p.init_visual_angle <= kTwoPi))
        errors.push_back("evolution.init_visual_angle must be in (0, 2*pi]");
}

// Draw order: off-diagonal weights row-major (one uniform each), nothing for
// the fixed starting rate and angle.
template <class Rng>
Phenotype random_phenotype(std::size_t n_neurons, const EvolutionParams& params, Rng& rng) {
    Phenotype p;
    p.weights = WeightMatrix(n_neurons);
    const double half = params.init_weight_half_range;
    for (std::size_t i = 0; i < n_neurons; ++i) {
        for (std::size_t j = 0; j < n_neurons; ++j) {
            if (i == j) continue;
            p.weights.at(i, j) = (2.0 * rng.next_double() - 1.0) * half;
        }
    }
    p.spontaneous_rate = params.init_spontaneous_rate;
    p.visual_angle = params.init_visual_angle;
    return p;
}

// Gaussian perturbation of every off-diagonal weight, the spontaneous rate
// and the visual angle. The diagonal is untouched; rate and angle are clamped
// back into their domains. Draw order: weights row-major (two uniforms per
// Gaussian), then rate, then angle.
template <class Rng>
Phenotype mutate(const Phenotype& parent, const EvolutionParams& params, Rng& rng) {
    Phenotype child = parent;
    const std::size_t n = child.weights.n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            child.weights.at(i, j) += next_gaussian(rng) * params.mutation_sigma;
        }
    }
    child.spontaneous_rate += next_gaussian(rng) * params.mutation_sigma;
    child.spontaneous_rate = std::clamp(child.spontaneous_rate, 0.0, 1.0);
    child.visual_angle += next_gaussian(rng) * params.visual_mutation_sigma;
    child.visual_angle = std::clamp(child.visual_angle, kMinVisualAngle, kTwoPi);
    return child;
}

// Column-swap crossover: each child keeps one parent's left column half and
// takes the other parent's right half; rate and angle pass through from the
// same-side parent. Mutation is applied separately by the caller. Swapping
// twice recovers the parents.
inline std::pair<Phenotype, Phenotype> crossover(const Phenotype& p1, const Phenotype& p2) {
    const std::size_t n = p1.weights.n;
    if (p2.weights.n != n)
        throw std::invalid_argument("crossover: weight matrix dimensions differ");
    if (n % 2 != 0)
        throw std::invalid_argument("crossover: weight matrix dimension must be even");

    Phenotype c1 = p1;
    Phenotype c2 = p2;
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = half; j < n; ++j) {
            c1.weights.at(i, j) = p2.weights.at(i, j);
            c2.weights.at(i, j) = p1.weights.at(i, j);
        }
    }
    return {std::move(c1), std::move(c2)};
}

} // namespace snnevo
