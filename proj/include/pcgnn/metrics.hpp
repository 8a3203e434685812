#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pcgnn/solvers.hpp"
#include "pcgnn/tilemap.hpp"

namespace pcgnn {

// Compressed byte size under the pinned compressor (LZMA, alone container,
// preset 9).
std::size_t compressed_size(std::string_view bytes);

// Compressor identity and settings, for report metadata.
const char* compression_metadata();

// Normalized compression distance over row-major glyph strings:
// (C(xy) - min(C(x), C(y))) / max(C(x), C(y)), with C(xy) taken as the
// cheaper of the two concatenation orders.
double compression_distance(const Level& a, const Level& b);

// Solver trajectories scaled to the unit square, resampled to 30 points,
// mean pointwise Euclidean distance normalized by sqrt(2). Exactly one
// unsolvable level maximizes the distance; two unsolvable levels compare
// equal.
double astar_diversity(const Level& a, const Level& b, GameId game);

// Fraction of expanded nodes that are off the final path. Unsolvable levels
// score 1 when a search actually ran, 0 when it could not even start.
double astar_difficulty(const Level& level, GameId game);

// Maze: 1 - dead-end fraction over the cells reachable from the start, 0 for
// unsolvable levels. Mario: per-column score (0 for a column holding an enemy
// or lacking any solid tile), averaged over columns.
double leniency(const Level& level);

// Mean over all unordered pairs.
double pairwise_average(std::span<const Level> levels,
                        const std::function<double(const Level&, const Level&)>& metric);

// mean/std (sample std, n-1) helpers shared by the report writers.
double mean_of(std::span<const double> values);
double sample_std(std::span<const double> values);

// (mean_a - mean_b) / std_a, the asymmetric variant.
double cohens_d(std::span<const double> sample_a, std::span<const double> sample_b);

struct BenchmarkRow {
    int width = 0;
    int height = 0;
    double median_seconds = 0.0;
    double std_seconds = 0.0;
    int trials = 0;
};

// Times `make_level(width, height)` per size; one warm-up run is discarded,
// then the median and std over `trials` runs are recorded. Strictly serial.
std::vector<BenchmarkRow> benchmark_generation(
    const std::function<void(int width, int height)>& make_level,
    std::span<const std::pair<int, int>> sizes, int trials);

std::string benchmark_csv(std::span<const BenchmarkRow> rows);

struct LevelSetMetrics {
    int level_count = 0;
    int solvable_count = 0;
    double solvability = 0.0;
    // Aggregated over solvable levels only, unless the set is flagged as the
    // random baseline; NaN when nothing qualifies.
    double compression_distance = 0.0;
    double astar_diversity = 0.0;
    double astar_difficulty = 0.0;
    double leniency = 0.0;
};

LevelSetMetrics evaluate_level_set(const std::vector<Level>& levels, GameId game,
                                   bool random_baseline_all_levels, int workers);

}  // namespace pcgnn
