#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "ptm/errors.hpp"
#include "ptm/rand.hpp"

namespace ptm {

/// Budgeted genetic search: a fixed small population evolved for a fixed
/// number of generations with elitism and tournament selection. There is no
/// convergence criterion; the point is a fast rough optimum, not exhaustion.
struct GaConfig {
    int population_size = 32;
    int generations = 40;
    double mutation_rate = 0.3;
    int tournament_size = 4;
    int elite_count = 2;
    std::uint64_t seed = 0;

    void validate() const {
        if (population_size < 1)
            throw ConfigError("ga: population_size must be positive");
        if (generations < 1) throw ConfigError("ga: generations must be positive");
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
            throw ConfigError("ga: mutation_rate must lie in [0, 1]");
        if (tournament_size < 1 || tournament_size > population_size)
            throw ConfigError("ga: tournament_size must lie in [1, population_size]");
        if (elite_count < 0 || elite_count >= population_size)
            throw ConfigError("ga: elite_count must lie in [0, population_size)");
    }
};

/// Per-generation best population fitness (entry 0 is the initial random
/// population). With elite_count >= 1 this sequence is non-decreasing.
struct GaTrace {
    std::vector<long long> best_per_generation;
};

/// Generic driver. The chromosome representation and its operators are
/// supplied by the caller:
///   init(rng) -> Chrom                      random valid chromosome
///   fitness(chrom) -> long long             higher is better
///   crossover(a, b, rng) -> Chrom           valid child
///   mutate(chrom&, rng)                     in-place, validity-preserving
///   tie_less(a, b) -> bool                  deterministic tie-break order
/// Returns the best chromosome seen across the initial population and every
/// generation; among equal-fitness candidates the tie_less-smallest wins.
/// Fully deterministic for a given cfg.seed.
template <typename Chrom, typename Init, typename Fitness, typename Crossover,
          typename Mutate, typename TieLess>
Chrom run_ga(const GaConfig& cfg, Init init, Fitness fitness, Crossover crossover,
             Mutate mutate, TieLess tie_less, GaTrace* trace = nullptr) {
    cfg.validate();
    Rng rng = make_rng(cfg.seed);
    const int pop_size = cfg.population_size;

    std::vector<Chrom> pop;
    pop.reserve(static_cast<std::size_t>(pop_size));
    for (int i = 0; i < pop_size; ++i) pop.push_back(init(rng));

    std::vector<long long> fit(static_cast<std::size_t>(pop_size));
    const auto evaluate = [&] {
        for (int i = 0; i < pop_size; ++i)
            fit[static_cast<std::size_t>(i)] = fitness(pop[static_cast<std::size_t>(i)]);
    };
    // Strictly-better ordering over population slots: fitness first, then the
    // caller's deterministic tie-break.
    const auto better = [&](int a, int b) {
        const auto fa = fit[static_cast<std::size_t>(a)];
        const auto fb = fit[static_cast<std::size_t>(b)];
        if (fa != fb) return fa > fb;
        return tie_less(pop[static_cast<std::size_t>(a)], pop[static_cast<std::size_t>(b)]);
    };

    evaluate();
    Chrom best = pop[0];
    long long best_fit = fit[0];
    const auto consider = [&](const Chrom& c, long long f) {
        if (f > best_fit || (f == best_fit && tie_less(c, best))) {
            best = c;
            best_fit = f;
        }
    };
    long long gen_best = fit[0];
    for (int i = 1; i < pop_size; ++i) {
        consider(pop[static_cast<std::size_t>(i)], fit[static_cast<std::size_t>(i)]);
        gen_best = std::max(gen_best, fit[static_cast<std::size_t>(i)]);
    }
    if (trace) trace->best_per_generation.push_back(gen_best);

    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::vector<int> order(static_cast<std::size_t>(pop_size));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), better);

        std::vector<Chrom> next;
        next.reserve(static_cast<std::size_t>(pop_size));
        for (int e = 0; e < cfg.elite_count; ++e)
            next.push_back(pop[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);

        const auto tournament = [&] {
            int winner = rand_index(rng, pop_size);
            for (int t = 1; t < cfg.tournament_size; ++t) {
                const int cand = rand_index(rng, pop_size);
                if (better(cand, winner)) winner = cand;
            }
            return winner;
        };
        while (static_cast<int>(next.size()) < pop_size) {
            const Chrom& pa = pop[static_cast<std::size_t>(tournament())];
            const Chrom& pb = pop[static_cast<std::size_t>(tournament())];
            Chrom child = crossover(pa, pb, rng);
            if (rand_unit(rng) < cfg.mutation_rate) mutate(child, rng);
            next.push_back(std::move(child));
        }

        pop = std::move(next);
        evaluate();
        gen_best = fit[0];
        consider(pop[0], fit[0]);
        for (int i = 1; i < pop_size; ++i) {
            consider(pop[static_cast<std::size_t>(i)], fit[static_cast<std::size_t>(i)]);
            gen_best = std::max(gen_best, fit[static_cast<std::size_t>(i)]);
        }
        if (trace) trace->best_per_generation.push_back(gen_best);
    }
    return best;
}

} // namespace ptm
