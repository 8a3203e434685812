#include "pcgnn/diversity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pcgnn/solvers.hpp"

namespace pcgnn {
namespace {

void require_same_shape(const Level& a, const Level& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("level distance: dimension mismatch");
    }
}

// BFS from (0,0) over non-solid cells. A solid start leaves nothing reachable.
std::vector<char> reachable_mask(const Level& level) {
    std::vector<char> mask(level.cells.size(), 0);
    if (level.solid_at(0, 0)) return mask;
    std::vector<int> stack{0};
    mask[0] = 1;
    while (!stack.empty()) {
        int idx = stack.back();
        stack.pop_back();
        int x = idx % level.width, y = idx / level.width;
        static constexpr int dxs[4] = {0, 0, -1, 1};
        static constexpr int dys[4] = {-1, 1, 0, 0};
        for (int k = 0; k < 4; ++k) {
            int nx = x + dxs[k], ny = y + dys[k];
            if (!level.in_bounds(nx, ny) || level.solid_at(nx, ny)) continue;
            int nidx = ny * level.width + nx;
            if (!mask[nidx]) {
                mask[nidx] = 1;
                stack.push_back(nidx);
            }
        }
    }
    return mask;
}

Level rewrite_unreachable_as_walls(const Level& level) {
    auto mask = reachable_mask(level);
    Level copy = level;
    for (std::size_t i = 0; i < copy.cells.size(); ++i) {
        if (!mask[i] && !level.tileset->solid(copy.cells[i])) copy.cells[i] = 1;
    }
    return copy;
}

// Linear interpolation of a polyline to `samples` evenly indexed points.
std::vector<std::pair<double, double>> resample(const std::vector<std::pair<int, int>>& points,
                                                int samples) {
    std::vector<std::pair<double, double>> out;
    out.reserve(samples);
    if (points.size() == 1) {
        out.assign(samples, {static_cast<double>(points[0].first), static_cast<double>(points[0].second)});
        return out;
    }
    const double last = static_cast<double>(points.size() - 1);
    for (int s = 0; s < samples; ++s) {
        double t = last * s / (samples - 1);
        auto lo = static_cast<std::size_t>(t);
        if (lo >= points.size() - 1) lo = points.size() - 2;
        double frac = t - static_cast<double>(lo);
        out.emplace_back(points[lo].first + frac * (points[lo + 1].first - points[lo].first),
                         points[lo].second + frac * (points[lo + 1].second - points[lo].second));
    }
    return out;
}

double block_hamming(const Level& a, const Level& b, int cx, int cy) {
    int differing = 0;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            int x = cx + dx, y = cy + dy;
            int va = a.in_bounds(x, y) ? a.at(x, y) : -1;
            int vb = b.in_bounds(x, y) ? b.at(x, y) : -1;
            if (va != vb) ++differing;
        }
    }
    return differing / 9.0;
}

std::vector<char> shortest_path_mask(const Level& level) {
    std::vector<char> mask(level.cells.size(), 0);
    auto result = solve_maze(level);
    for (const auto& [x, y] : result.trajectory) mask[y * level.width + x] = 1;
    return mask;
}

}  // namespace

const char* distance_function_name(DistanceFunctionId id) {
    switch (id) {
        case DistanceFunctionId::VisualDiversity: return "visual_diversity";
        case DistanceFunctionId::VisualDiversityReachable: return "visual_diversity_reachable";
        case DistanceFunctionId::Euclidean: return "euclidean";
        case DistanceFunctionId::Path: return "path";
        case DistanceFunctionId::JS: return "js";
        case DistanceFunctionId::Window: return "window";
        case DistanceFunctionId::WindowV2: return "window_v2";
        case DistanceFunctionId::HashAverage: return "hash_average";
    }
    return "unknown";
}

DistanceFunctionId distance_function_from_name(const std::string& name) {
    for (auto id : {DistanceFunctionId::VisualDiversity, DistanceFunctionId::VisualDiversityReachable,
                    DistanceFunctionId::Euclidean, DistanceFunctionId::Path, DistanceFunctionId::JS,
                    DistanceFunctionId::Window, DistanceFunctionId::WindowV2,
                    DistanceFunctionId::HashAverage}) {
        if (name == distance_function_name(id)) return id;
    }
    throw std::invalid_argument("unknown distance function: " + name);
}

double visual_diversity(const Level& a, const Level& b) {
    require_same_shape(a, b);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < a.cells.size(); ++i) differing += a.cells[i] != b.cells[i];
    return static_cast<double>(differing) / static_cast<double>(a.cells.size());
}

double visual_diversity_reachable(const Level& a, const Level& b) {
    require_same_shape(a, b);
    return visual_diversity(rewrite_unreachable_as_walls(a), rewrite_unreachable_as_walls(b));
}

double euclidean_distance(const Level& a, const Level& b) {
    require_same_shape(a, b);
    if (a.tileset != b.tileset) throw std::invalid_argument("euclidean_distance: tileset mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        double d = static_cast<double>(a.cells[i]) - static_cast<double>(b.cells[i]);
        sum += d * d;
    }
    const double max_norm = (a.tileset->size() - 1) * std::sqrt(static_cast<double>(a.cells.size()));
    return std::sqrt(sum) / max_norm;
}

double path_distance(const Level& a, const Level& b) {
    require_same_shape(a, b);
    auto ra = solve_maze(a);
    auto rb = solve_maze(b);
    if (!ra.solvable && !rb.solvable) return 0.0;
    if (!ra.solvable || !rb.solvable) return 1.0;
    constexpr int kSamples = 30;
    auto pa = resample(ra.trajectory, kSamples);
    auto pb = resample(rb.trajectory, kSamples);
    double total = 0.0;
    for (int s = 0; s < kSamples; ++s) {
        total += std::abs(pa[s].first - pb[s].first) + std::abs(pa[s].second - pb[s].second);
    }
    return total / kSamples / static_cast<double>(a.width + a.height - 2);
}

double js_distance(const Level& a, const Level& b) {
    require_same_shape(a, b);
    auto ma = reachable_mask(a);
    auto mb = reachable_mask(b);
    auto count = [](const std::vector<char>& m) {
        return std::count(m.begin(), m.end(), char{1});
    };
    long na = count(ma), nb = count(mb);
    // An empty reachable set degenerates to a point mass at the origin.
    if (na == 0) {
        ma.assign(ma.size(), 0);
        ma[0] = 1;
        na = 1;
    }
    if (nb == 0) {
        mb.assign(mb.size(), 0);
        mb[0] = 1;
        nb = 1;
    }
    double js = 0.0;
    for (std::size_t i = 0; i < ma.size(); ++i) {
        double p = ma[i] ? 1.0 / na : 0.0;
        double q = mb[i] ? 1.0 / nb : 0.0;
        if (p == 0.0 && q == 0.0) continue;
        double m = 0.5 * (p + q);
        // both halves folded in together, so swapping arguments is bit-exact
        double p_term = p > 0.0 ? 0.5 * p * std::log2(p / m) : 0.0;
        double q_term = q > 0.0 ? 0.5 * q * std::log2(q / m) : 0.0;
        js += p_term + q_term;
    }
    return std::clamp(js, 0.0, 1.0);
}

double window_distance(const Level& a, const Level& b, WindowMode mode) {
    require_same_shape(a, b);
    auto anchors_a = mode == WindowMode::AllReachable ? reachable_mask(a) : shortest_path_mask(a);
    auto anchors_b = mode == WindowMode::AllReachable ? reachable_mask(b) : shortest_path_mask(b);
    double total = 0.0;
    long anchors = 0;
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            bool in_a = anchors_a[y * a.width + x];
            bool in_b = anchors_b[y * a.width + x];
            if (!in_a && !in_b) continue;
            ++anchors;
            total += (in_a && in_b) ? block_hamming(a, b, x, y) : 1.0;
        }
    }
    return anchors ? total / anchors : 0.0;
}

std::uint64_t average_hash(const Level& level) {
    const int n = level.tileset->size();
    double gray[64];
    for (int by = 0; by < 8; ++by) {
        int y0 = by * level.height / 8;
        int y1 = std::max(y0 + 1, (by + 1) * level.height / 8);
        y0 = std::min(y0, level.height - 1);
        y1 = std::min(y1, level.height);
        for (int bx = 0; bx < 8; ++bx) {
            int x0 = bx * level.width / 8;
            int x1 = std::max(x0 + 1, (bx + 1) * level.width / 8);
            x0 = std::min(x0, level.width - 1);
            x1 = std::min(x1, level.width);
            double sum = 0.0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) sum += static_cast<double>(level.at(x, y)) / (n - 1);
            }
            gray[by * 8 + bx] = sum / ((y1 - y0) * (x1 - x0));
        }
    }
    double mean = 0.0;
    for (double v : gray) mean += v;
    mean /= 64.0;
    std::uint64_t signature = 0;
    for (int bit = 0; bit < 64; ++bit) {
        if (gray[bit] > mean) signature |= std::uint64_t{1} << bit;  // ties resolve to 0
    }
    return signature;
}

double hash_average_distance(const Level& a, const Level& b) {
    require_same_shape(a, b);
    return static_cast<double>(std::popcount(average_hash(a) ^ average_hash(b))) / 64.0;
}

double level_distance(DistanceFunctionId id, const Level& a, const Level& b) {
    switch (id) {
        case DistanceFunctionId::VisualDiversity: return visual_diversity(a, b);
        case DistanceFunctionId::VisualDiversityReachable: return visual_diversity_reachable(a, b);
        case DistanceFunctionId::Euclidean: return euclidean_distance(a, b);
        case DistanceFunctionId::Path: return path_distance(a, b);
        case DistanceFunctionId::JS: return js_distance(a, b);
        case DistanceFunctionId::Window: return window_distance(a, b, WindowMode::AllReachable);
        case DistanceFunctionId::WindowV2: return window_distance(a, b, WindowMode::ShortestPath);
        case DistanceFunctionId::HashAverage: return hash_average_distance(a, b);
    }
    throw std::invalid_argument("unknown distance function id");
}

double generator_distance(std::span<const Level> a, std::span<const Level> b, DistanceFunctionId id) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("generator_distance: level lists must have equal, nonzero length");
    }
    double total = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) total += level_distance(id, a[n], b[n]);
    return total / static_cast<double>(a.size());
}

double novelty_from_distances(std::vector<double> distances, int k) {
    if (distances.empty()) return 0.0;
    std::sort(distances.begin(), distances.end());
    int take = std::min<int>(k, static_cast<int>(distances.size()));
    double sum = 0.0;
    for (int i = 0; i < take; ++i) sum += distances[i];
    return sum / take;
}

std::vector<double> novelty_scores(const std::vector<std::vector<Level>>& population_levels,
                                   NoveltyArchive& archive, const NoveltyConfig& config, Rng& rng,
                                   std::vector<std::string>* warnings) {
    const int pop = static_cast<int>(population_levels.size());
    if (pop == 0) throw std::invalid_argument("novelty_scores: empty population");

    int k = config.k_neighbors;
    const int available = pop - 1 + static_cast<int>(archive.entries.size());
    if (k > available) {
        if (warnings) {
            warnings->push_back("novelty K clamped from " + std::to_string(k) + " to " +
                                std::to_string(std::max(available, 1)));
        }
        k = std::max(available, 1);
    }

    std::vector<double> scores(pop, 0.0);
    std::vector<double> distances;
    for (int i = 0; i < pop; ++i) {
        distances.clear();
        for (int j = 0; j < pop; ++j) {
            if (j == i) continue;
            distances.push_back(
                generator_distance(population_levels[i], population_levels[j], config.distance));
        }
        for (const auto& entry : archive.entries) {
            distances.push_back(generator_distance(population_levels[i], entry, config.distance));
        }
        scores[i] = novelty_from_distances(distances, k);
    }

    // Uniformly sampled individuals enter the archive after scoring.
    int to_add = std::min(config.lambda, pop);
    if (to_add > 0) {
        std::vector<int> order(pop);
        for (int i = 0; i < pop; ++i) order[i] = i;
        for (int t = 0; t < to_add; ++t) {
            int j = t + static_cast<int>(rng.below(pop - t));
            std::swap(order[t], order[j]);
            archive.entries.push_back(population_levels[order[t]]);
        }
    }
    return scores;
}

double intra_novelty(const std::vector<Level>& levels, int intra_k, DistanceFunctionId id,
                     std::vector<std::string>* warnings) {
    const int n = static_cast<int>(levels.size());
    if (n < 2) throw std::invalid_argument("intra_novelty needs at least two levels");
    int k = intra_k;
    if (k > n - 1) {
        if (warnings) {
            warnings->push_back("intra_k clamped from " + std::to_string(k) + " to " +
                                std::to_string(n - 1));
        }
        k = n - 1;
    }
    double total = 0.0;
    std::vector<double> distances;
    for (int i = 0; i < n; ++i) {
        distances.clear();
        for (int j = 0; j < n; ++j) {
            if (j != i) distances.push_back(level_distance(id, levels[i], levels[j]));
        }
        total += novelty_from_distances(distances, k);
    }
    return total / n;
}

std::string distance_matrix_csv(std::span<const Level> levels, DistanceFunctionId id) {
    std::ostringstream out;
    out << "i,j,distance\n";
    char buf[32];
    for (std::size_t i = 0; i < levels.size(); ++i) {
        for (std::size_t j = i + 1; j < levels.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", level_distance(id, levels[i], levels[j]));
            out << i << ',' << j << ',' << buf << '\n';
        }
    }
    return out.str();
}

}  // namespace pcgnn
