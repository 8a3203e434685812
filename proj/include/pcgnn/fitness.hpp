#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcgnn/diversity.hpp"
#include "pcgnn/generator.hpp"
#include "pcgnn/neat.hpp"
#include "pcgnn/solvers.hpp"
#include "pcgnn/tilemap.hpp"

namespace pcgnn {

struct FitnessWeights {
    double novelty = 0.0;
    double solvability = 0.0;
    double intra = 0.0;
};

struct TrainConfig {
    GameId game = GameId::Maze;
    int generations = 200;
    int levels_per_individual = 24;
    NeatConfig neat;
    NoveltyConfig novelty;
    FitnessWeights weights{0.399, 0.202, 0.399};
    GeneratorSettings generator;
    int level_width = 14;
    int level_height = 14;
    std::uint64_t master_seed = 0;
    int workers = 1;
    bool validate_genomes = false;  // per-generation structural validation, for test builds
};

struct GenerationStats {
    int generation;
    double best, mean, worst;                   // composite fitness
    double best_solv, best_intra, best_novelty;  // components of the generation's best
    double seconds_phase1, seconds_phase2;
    double mean_solvability;  // population mean, tracked for sanity checks (not in the CSV)
};

struct TrainReport {
    std::vector<GenerationStats> rows;
    std::vector<std::string> warnings;
    long validator_failures = 0;
};

struct TrainResult {
    Genome best;
    TrainReport report;
};

// Fraction of solvable levels.
double solvability_fitness(const std::vector<Level>& levels, GameId game);

// Shannon entropy of the tile frequencies, normalized by log2(n) when n > 2.
double chunk_entropy(std::span<const std::uint8_t> tiles, int n_tile_types);

// Mean entropy over the non-overlapping chunk grid (ragged edge chunks kept
// at their true size); fitness = min(10, 1 / |mean - desired|), exact match
// capping at 10.
double entropy_fitness(const Level& level, int chunk_edge, double desired_entropy);

// One third each for an open start, an open goal, and an empty-cell path
// between them.
double partial_solvability(const Level& level);

struct IndividualEvaluation {
    std::vector<Level> levels;
    double solvability = 0.0;
    double intra = 0.0;
    double simple_fitness = 0.0;  // solvability and intra components; novelty needs the population
};

IndividualEvaluation evaluate_individual(const Genome& genome, const TrainConfig& config, Rng& rng);

// Per-genome stream: levels depend on the master seed and the genome alone,
// so re-evaluating an elite reproduces its fitness exactly and results do not
// depend on scheduling.
Rng evaluation_rng(const TrainConfig& config, const Genome& genome);

// The full training loop: evaluate, score novelty over the population and
// archive, combine the weighted fitness, reproduce, and return the best
// individual ever observed (ties broken by solvability, then genome size).
TrainResult train(const TrainConfig& config);

std::string train_report_csv(const TrainReport& report);

}  // namespace pcgnn
