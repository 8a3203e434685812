#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcgnn/diversity.hpp"
#include "pcgnn/rng.hpp"
#include "pcgnn/tilemap.hpp"

namespace pcgnn {

// The tile grid itself is the genotype.
using GridGenome = std::vector<std::uint8_t>;

struct DirectGAConfig {
    int population_size = 100;
    int generations = 100;
    double desired_entropy = 1.0;
    int chunk_edge = 7;
    bool use_partial_solvability = true;
    bool use_novelty = false;
    double entropy_weight = 0.5;
    double partial_solvability_weight = 0.5;
    double novelty_weight = 0.0;
    double mutation_prob = 0.2;
    int elitism = 1;  // keeps the best individual; not part of the original method
    NoveltyConfig novelty{15, 1, DistanceFunctionId::VisualDiversity, 1};
};

// Selection probability proportional to fitness; all-zero fitness degrades to
// a uniform pick. Negative fitness is rejected.
int roulette_select(std::span<const double> fitnesses, Rng& rng);

// Two cut points i <= j drawn uniformly (0..len inclusive), middle segments
// swapped.
void two_point_crossover(std::span<const std::uint8_t> parent_a, std::span<const std::uint8_t> parent_b,
                         GridGenome& child_a, GridGenome& child_b, Rng& rng);

// One full evolution run producing a single level: weighted entropy +
// partial-solvability fitness (plus population novelty when enabled),
// roulette selection, two-point crossover, per-gene mutation.
Level directga_evolve(const DirectGAConfig& config, int width, int height, const Tileset& tileset,
                      Rng& rng);

}  // namespace pcgnn
