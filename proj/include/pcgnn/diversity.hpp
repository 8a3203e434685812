#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcgnn/rng.hpp"
#include "pcgnn/tilemap.hpp"

namespace pcgnn {

enum class DistanceFunctionId {
    VisualDiversity,
    VisualDiversityReachable,
    Euclidean,
    Path,
    JS,
    Window,
    WindowV2,
    HashAverage,
};

const char* distance_function_name(DistanceFunctionId id);
DistanceFunctionId distance_function_from_name(const std::string& name);

// All functions are symmetric with range [0,1] on same-shaped levels.

// Fraction of cells whose tiles differ.
double visual_diversity(const Level& a, const Level& b);

// Empty cells that cannot be reached from (0,0) count as walls first.
double visual_diversity_reachable(const Level& a, const Level& b);

// L2 over the integer grids, normalized by the largest possible norm.
double euclidean_distance(const Level& a, const Level& b);

// Shortest paths resampled to 30 points, mean Manhattan gap normalized by
// width+height-2. One unsolvable level maximizes the distance; two
// unsolvable levels compare equal.
double path_distance(const Level& a, const Level& b);

// Jensen-Shannon divergence (log2) between uniform distributions over each
// level's reachable cells; no reachable cells collapses to a point mass at
// the origin.
double js_distance(const Level& a, const Level& b);

enum class WindowMode { AllReachable, ShortestPath };

// Per-anchor 3x3 block Hamming fraction, averaged over the union of anchor
// sets; an anchor present in only one level counts as fully different.
double window_distance(const Level& a, const Level& b, WindowMode mode);

// 8x8 mean-pooled grayscale thresholded at the image mean (ties to 0),
// compared by normalized Hamming distance of the 64-bit signatures.
double hash_average_distance(const Level& a, const Level& b);
std::uint64_t average_hash(const Level& level);

double level_distance(DistanceFunctionId id, const Level& a, const Level& b);

// Mean distance between positionally paired levels of two generators.
double generator_distance(std::span<const Level> a, std::span<const Level> b, DistanceFunctionId id);

struct NoveltyArchive {
    std::vector<std::vector<Level>> entries;  // one stored level-set per archived individual
};

struct NoveltyConfig {
    int k_neighbors = 15;
    int lambda = 0;
    DistanceFunctionId distance = DistanceFunctionId::VisualDiversityReachable;
    int intra_k = 10;
};

// Mean of the k smallest values; the values are sorted ascending and summed
// in that order so independent implementations agree bit-for-bit.
double novelty_from_distances(std::vector<double> distances, int k);

// Per-individual mean distance to the K nearest neighbours among the rest of
// the population and the archive; afterwards lambda uniformly sampled
// individuals are appended to the archive.
std::vector<double> novelty_scores(const std::vector<std::vector<Level>>& population_levels,
                                   NoveltyArchive& archive, const NoveltyConfig& config, Rng& rng,
                                   std::vector<std::string>* warnings = nullptr);

// Mean over levels of the mean distance to each level's intra_k nearest
// siblings. No archive is involved.
double intra_novelty(const std::vector<Level>& levels, int intra_k, DistanceFunctionId id,
                     std::vector<std::string>* warnings = nullptr);

// "i,j,distance" rows over the upper triangle, for debugging.
std::string distance_matrix_csv(std::span<const Level> levels, DistanceFunctionId id);

}  // namespace pcgnn
