#include "pcgnn/directga.hpp"

#include <algorithm>
#include <stdexcept>

#include "pcgnn/fitness.hpp"

namespace pcgnn {

int roulette_select(std::span<const double> fitnesses, Rng& rng) {
    if (fitnesses.empty()) throw std::invalid_argument("roulette_select: empty population");
    double total = 0.0;
    for (double f : fitnesses) {
        if (f < 0.0) throw std::invalid_argument("roulette_select: negative fitness");
        total += f;
    }
    if (total <= 0.0) return static_cast<int>(rng.below(fitnesses.size()));
    double target = rng.uniform01() * total;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < fitnesses.size(); ++i) {
        cumulative += fitnesses[i];
        if (target < cumulative) return static_cast<int>(i);
    }
    return static_cast<int>(fitnesses.size() - 1);
}

void two_point_crossover(std::span<const std::uint8_t> parent_a, std::span<const std::uint8_t> parent_b,
                         GridGenome& child_a, GridGenome& child_b, Rng& rng) {
    if (parent_a.size() != parent_b.size()) {
        throw std::invalid_argument("two_point_crossover: length mismatch");
    }
    const std::size_t len = parent_a.size();
    auto cut1 = rng.below(len + 1);
    auto cut2 = rng.below(len + 1);
    if (cut1 > cut2) std::swap(cut1, cut2);
    child_a.assign(parent_a.begin(), parent_a.end());
    child_b.assign(parent_b.begin(), parent_b.end());
    for (std::size_t i = cut1; i < cut2; ++i) std::swap(child_a[i], child_b[i]);
}

Level directga_evolve(const DirectGAConfig& config, int width, int height, const Tileset& tileset,
                      Rng& rng) {
    if (width < 2 || height < 2) throw std::invalid_argument("directga_evolve: degenerate dimensions");
    const std::size_t genes = static_cast<std::size_t>(width) * height;
    const auto n_tiles = static_cast<std::uint64_t>(tileset.size());
    const int pop_size = config.population_size;

    std::vector<GridGenome> population(pop_size);
    for (auto& genome : population) {
        genome.resize(genes);
        for (auto& g : genome) g = static_cast<std::uint8_t>(rng.below(n_tiles));
    }

    NoveltyArchive archive;
    auto as_level = [&](const GridGenome& genome) {
        Level level(width, height, tileset);
        level.cells = genome;
        return level;
    };

    std::vector<double> fitnesses(pop_size);
    auto evaluate = [&]() {
        std::vector<std::vector<Level>> level_lists;
        if (config.use_novelty) level_lists.reserve(pop_size);
        std::vector<Level> levels;
        levels.reserve(pop_size);
        for (const auto& genome : population) levels.push_back(as_level(genome));
        for (int i = 0; i < pop_size; ++i) {
            double f = config.entropy_weight *
                       entropy_fitness(levels[i], config.chunk_edge, config.desired_entropy);
            if (config.use_partial_solvability) {
                f += config.partial_solvability_weight * partial_solvability(levels[i]);
            }
            fitnesses[i] = f;
        }
        if (config.use_novelty) {
            for (auto& level : levels) level_lists.push_back({std::move(level)});
            auto novelty = novelty_scores(level_lists, archive, config.novelty, rng);
            for (int i = 0; i < pop_size; ++i) fitnesses[i] += config.novelty_weight * novelty[i];
        }
    };

    evaluate();
    auto best_index = [&]() {
        int best = 0;
        for (int i = 1; i < pop_size; ++i) {
            if (fitnesses[i] > fitnesses[best]) best = i;
        }
        return best;
    };

    GridGenome child_a, child_b;
    for (int gen = 0; gen < config.generations; ++gen) {
        std::vector<GridGenome> next;
        next.reserve(pop_size);
        for (int e = 0; e < std::min(config.elitism, pop_size); ++e) {
            next.push_back(population[best_index()]);
        }
        while (static_cast<int>(next.size()) < pop_size) {
            const GridGenome& pa = population[roulette_select(fitnesses, rng)];
            const GridGenome& pb = population[roulette_select(fitnesses, rng)];
            two_point_crossover(pa, pb, child_a, child_b, rng);
            for (auto* child : {&child_a, &child_b}) {
                for (auto& g : *child) {
                    if (rng.chance(config.mutation_prob)) g = static_cast<std::uint8_t>(rng.below(n_tiles));
                }
            }
            next.push_back(child_a);
            if (static_cast<int>(next.size()) < pop_size) next.push_back(child_b);
        }
        population = std::move(next);
        evaluate();
    }

    return as_level(population[best_index()]);
}

}  // namespace pcgnn
