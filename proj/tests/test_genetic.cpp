#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "spsafs/genetic.hpp"

using namespace spsafs;

namespace {

LossMeasurement fixed_loss(const FeatureMask& mask, double value) {
    LossMeasurement m;
    m.mask = mask;
    m.mean = value;
    m.per_repetition = {value};
    return m;
}

Objective hamming_oracle(const FeatureMask& target, std::size_t* calls = nullptr) {
    return [target, calls](const FeatureMask& mask) {
        if (calls) ++*calls;
        double d = 0.0;
        for (std::size_t i = 0; i < mask.size(); ++i) d += mask[i] != target[i];
        return fixed_loss(mask, d / static_cast<double>(mask.size()));
    };
}

}  // namespace

TEST_CASE("xor crossover follows the truth table") {
    CHECK(crossover_xor({1, 0, 1, 0}, {1, 1, 0, 0}) == FeatureMask{0, 1, 1, 0});
    CHECK(crossover_xor({0, 0}, {0, 0}) == FeatureMask{0, 0});
    CHECK_THROWS(crossover_xor({1}, {1, 0}));
}

TEST_CASE("mutation probabilities at the extremes") {
    RandomStream rng(6);
    const FeatureMask bits{1, 0, 1, 1, 0, 0, 1, 0};
    CHECK(mutate_bits(bits, 0.0, rng) == bits);
    const FeatureMask flipped = mutate_bits(bits, 1.0, rng);
    for (std::size_t i = 0; i < bits.size(); ++i) CHECK(flipped[i] == (bits[i] ^ 1));
}

TEST_CASE("mutation rate is honoured on average") {
    RandomStream rng(15);
    const FeatureMask zeros(1000, 0);
    std::size_t flips = 0;
    for (int trial = 0; trial < 20; ++trial)
        flips += selected_count(mutate_bits(zeros, 0.1, rng));
    CHECK_THAT(flips / 20000.0, Catch::Matchers::WithinAbs(0.1, 0.02));
}

TEST_CASE("tournament keeps the fittest of its draws") {
    std::vector<Chromosome> pop(3);
    pop[0].bits = {1, 0};
    pop[0].fitness = fixed_loss(pop[0].bits, 0.3);
    pop[1].bits = {0, 1};
    pop[1].fitness = fixed_loss(pop[1].bits, 0.1);
    pop[2].bits = {1, 1};
    pop[2].fitness = fixed_loss(pop[2].bits, 0.2);
    RandomStream rng(8);
    // 50 draws with replacement almost surely include index 1.
    CHECK(tournament_select(pop, 50, rng) == 1);
}

TEST_CASE("tournament ties prefer the lowest population index") {
    std::vector<Chromosome> pop(3);
    pop[0].bits = {1, 0};
    pop[0].fitness = fixed_loss(pop[0].bits, 0.1);
    pop[1].bits = {0, 1};
    pop[1].fitness = fixed_loss(pop[1].bits, 0.1);
    pop[2].bits = {1, 1};
    pop[2].fitness = fixed_loss(pop[2].bits, 0.9);
    RandomStream rng(8);
    CHECK(tournament_select(pop, 50, rng) == 0);
}

TEST_CASE("ga finds the optimum of a separable landscape") {
    const FeatureMask target{1, 0, 1, 0, 0, 1};
    GAConfig cfg;
    cfg.population_size = 20;
    cfg.max_generations = 40;
    cfg.stall_generations = 40;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        cfg.master_seed = seed;
        const FSResult r = run_bga(hamming_oracle(target), 6, cfg);
        CHECK(r.best_mask == target);
        CHECK(r.best_measurement.loss() == 0.0);
    }
}

TEST_CASE("ga evaluation budget stays within population x (generations + 1)") {
    std::size_t calls = 0;
    const FeatureMask target{1, 1, 0, 0, 1, 0, 1, 0};
    GAConfig cfg;
    cfg.population_size = 10;
    cfg.max_generations = 15;
    cfg.stall_generations = 15;
    cfg.master_seed = 4;
    const FSResult r = run_bga(hamming_oracle(target, &calls), 8, cfg);
    CHECK(r.evaluations == calls);
    CHECK(calls <= 10 * (15 + 1));
    // Elites and untouched clones skip re-evaluation, so the count is
    // strictly below the ceiling.
    CHECK(calls < 10 * (15 + 1));
}

TEST_CASE("elitism makes the generation best non-increasing") {
    // Noisy oracle: same mask, different values across calls.
    std::uint64_t counter = 0;
    const Objective noisy = [&counter](const FeatureMask& mask) {
        const double base =
            static_cast<double>(selected_count(mask)) / (2.0 * mask.size());
        const double jitter =
            static_cast<double>(mix64(++counter) % 1000) / 5000.0;
        return fixed_loss(mask, base + jitter);
    };
    GAConfig cfg;
    cfg.population_size = 12;
    cfg.max_generations = 25;
    cfg.stall_generations = 25;
    cfg.master_seed = 10;
    const FSResult r = run_bga(noisy, 10, cfg);
    REQUIRE(r.trace.size() >= 2);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        CHECK(r.trace[i].y_iterate <= r.trace[i - 1].y_iterate + 1e-15);
        CHECK(r.trace[i].best_so_far <= r.trace[i - 1].best_so_far + 1e-15);
    }
    CHECK(std::isnan(r.trace[0].y_plus));
    CHECK(std::isnan(r.trace[0].y_minus));
}

TEST_CASE("ga replays deterministically and stalls on constant fitness") {
    const Objective constant = [](const FeatureMask& mask) {
        return fixed_loss(mask, 0.4);
    };
    GAConfig cfg;
    cfg.population_size = 8;
    cfg.max_generations = 50;
    cfg.stall_generations = 10;
    cfg.master_seed = 33;
    const FSResult a = run_bga(constant, 5, cfg);
    const FSResult b = run_bga(constant, 5, cfg);
    CHECK(a.best_mask == b.best_mask);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.termination == Termination::stalled);
    // Generation 0 improves, then 10 stalled generations.
    CHECK(a.trace.size() == 11);
}

TEST_CASE("ga configuration is validated") {
    const Objective oracle = hamming_oracle(FeatureMask{1, 0});
    GAConfig cfg;
    cfg.population_size = 1;
    CHECK_THROWS(run_bga(oracle, 2, cfg));
    cfg = GAConfig{};
    cfg.elite_count = 30;
    CHECK_THROWS(run_bga(oracle, 2, cfg));
    cfg = GAConfig{};
    cfg.mutation_prob = 1.5;
    CHECK_THROWS(run_bga(oracle, 2, cfg));
}
