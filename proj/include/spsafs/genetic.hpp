#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spsafs/mask.hpp"
#include "spsafs/measurement.hpp"
#include "spsafs/random.hpp"
#include "spsafs/result.hpp"

namespace spsafs {

struct GAConfig {
    std::size_t population_size = 30;
    std::size_t max_generations = 100;
    std::size_t stall_generations = 25;
    std::size_t elite_count = 2;
    std::size_t tournament_size = 2;
    double crossover_prob = 0.8;
    double mutation_prob = 0.1;  // per bit
    std::uint64_t master_seed = 1;

    void validate() const {
        if (population_size < 2) throw std::invalid_argument("ga: population too small");
        if (elite_count >= population_size)
            throw std::invalid_argument("ga: elites must leave room for offspring");
        if (tournament_size < 1) throw std::invalid_argument("ga: empty tournament");
        if (crossover_prob < 0.0 || crossover_prob > 1.0 || mutation_prob < 0.0 ||
            mutation_prob > 1.0)
            throw std::invalid_argument("ga: probabilities outside [0, 1]");
    }
};

struct Chromosome {
    FeatureMask bits;
    std::optional<LossMeasurement> fitness;  // empty until evaluated

    double loss() const {
        return fitness ? fitness->loss() : std::numeric_limits<double>::infinity();
    }
};

// Uniform crossover where each differing bit flips a fair coin is the same
// as XOR-masking: equal bits pass through, differing bits are random. Here
// the child takes parent one's bits where parents agree and parent two's
// complement view otherwise, i.e. plain XOR of the two bit strings.
inline FeatureMask crossover_xor(const FeatureMask& a, const FeatureMask& b) {
    if (a.size() != b.size()) throw std::invalid_argument("crossover: length mismatch");
    FeatureMask child(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) child[i] = a[i] ^ b[i];
    return child;
}

inline FeatureMask mutate_bits(const FeatureMask& bits, double prob, RandomStream& rng) {
    FeatureMask out = bits;
    for (auto& b : out)
        if (rng.next_bernoulli(prob)) b ^= 1;
    return out;
}

// Index of the tournament winner: best loss among `size` draws with
// replacement, ties keeping the lowest population index.
inline std::size_t tournament_select(const std::vector<Chromosome>& population,
                                     std::size_t size, RandomStream& rng) {
    std::size_t best = static_cast<std::size_t>(rng.next_below(population.size()));
    for (std::size_t t = 1; t < size; ++t) {
        const std::size_t i = static_cast<std::size_t>(rng.next_below(population.size()));
        if (population[i].loss() < population[best].loss() ||
            (population[i].loss() == population[best].loss() && i < best))
            best = i;
    }
    return best;
}

// Generational binary GA with elitism. Only chromosomes without a cached
// fitness are evaluated, so elites and untouched clones cost nothing; total
// evaluations stay within population_size * (generations + 1).
inline FSResult run_bga(const Objective& objective, std::size_t n_features,
                        const GAConfig& config) {
    config.validate();
    if (n_features == 0) throw std::invalid_argument("run_bga: no features");

    RandomStream rng(config.master_seed);
    FSResult result;
    std::size_t evaluations = 0;

    auto evaluate_new = [&](std::vector<Chromosome>& pop) {
        for (Chromosome& c : pop)
            if (!c.fitness) {
                c.fitness = objective(c.bits);
                ++evaluations;
            }
    };
    auto by_loss = [](const Chromosome& a, const Chromosome& b) {
        return a.loss() < b.loss();
    };

    std::vector<Chromosome> population(config.population_size);
    for (Chromosome& c : population) c.bits = random_mask(n_features, rng);
    evaluate_new(population);

    bool have_best = false;
    std::size_t stall = 0;
    result.termination = Termination::max_iterations;

    auto record_generation = [&](std::size_t gen) {
        const Chromosome& gen_best =
            *std::min_element(population.begin(), population.end(), by_loss);
        bool improved = false;
        if (!have_best || gen_best.loss() < result.best_measurement.loss()) {
            result.best_measurement = *gen_best.fitness;
            result.best_mask = gen_best.bits;
            have_best = true;
            improved = true;
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        result.trace.push_back({gen, nan, nan, gen_best.loss(),
                                result.best_measurement.loss(),
                                selected_count(result.best_mask)});
        return improved;
    };

    record_generation(0);
    for (std::size_t gen = 1; gen <= config.max_generations; ++gen) {
        std::vector<Chromosome> next;
        next.reserve(config.population_size);

        // Elites carry their bits and fitness over unchanged.
        std::vector<std::size_t> order(population.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return population[a].loss() < population[b].loss();
        });
        for (std::size_t e = 0; e < config.elite_count; ++e)
            next.push_back(population[order[e]]);

        while (next.size() < config.population_size) {
            const std::size_t p1 = tournament_select(population, config.tournament_size, rng);
            Chromosome child;
            if (rng.next_bernoulli(config.crossover_prob)) {
                const std::size_t p2 =
                    tournament_select(population, config.tournament_size, rng);
                child.bits = crossover_xor(population[p1].bits, population[p2].bits);
            } else {
                child = population[p1];  // clone keeps its fitness
            }
            FeatureMask mutated = mutate_bits(child.bits, config.mutation_prob, rng);
            if (mutated != child.bits) {
                child.bits = std::move(mutated);
                child.fitness.reset();
            }
            next.push_back(std::move(child));
        }

        population = std::move(next);
        evaluate_new(population);

        if (record_generation(gen)) {
            stall = 0;
        } else if (++stall >= config.stall_generations) {
            result.termination = Termination::stalled;
            break;
        }
    }

    result.evaluations = evaluations;
    return result;
}

}  // namespace spsafs
