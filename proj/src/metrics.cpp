#include "pcgnn/metrics.hpp"

#include <lzma.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pcgnn/parallel.hpp"

namespace pcgnn {
namespace {

constexpr int kResamplePoints = 30;

std::vector<std::pair<double, double>> resample_normalized(
    const std::vector<std::pair<int, int>>& points, int width, int height) {
    std::vector<std::pair<double, double>> scaled;
    scaled.reserve(kResamplePoints);
    auto norm = [&](const std::pair<int, int>& p) {
        return std::make_pair(static_cast<double>(p.first) / width,
                              static_cast<double>(p.second) / height);
    };
    if (points.size() == 1) {
        scaled.assign(kResamplePoints, norm(points[0]));
        return scaled;
    }
    const double last = static_cast<double>(points.size() - 1);
    for (int s = 0; s < kResamplePoints; ++s) {
        double t = last * s / (kResamplePoints - 1);
        auto lo = static_cast<std::size_t>(t);
        if (lo >= points.size() - 1) lo = points.size() - 2;
        double frac = t - static_cast<double>(lo);
        auto a = norm(points[lo]);
        auto b = norm(points[lo + 1]);
        scaled.emplace_back(a.first + frac * (b.first - a.first),
                            a.second + frac * (b.second - a.second));
    }
    return scaled;
}

}  // namespace

std::size_t compressed_size(std::string_view bytes) {
    lzma_options_lzma options;
    if (lzma_lzma_preset(&options, 9)) throw std::runtime_error("lzma preset failed");
    lzma_stream stream = LZMA_STREAM_INIT;
    if (lzma_alone_encoder(&stream, &options) != LZMA_OK) {
        throw std::runtime_error("lzma encoder init failed");
    }
    std::vector<std::uint8_t> out(bytes.size() * 2 + 512);
    stream.next_in = reinterpret_cast<const std::uint8_t*>(bytes.data());
    stream.avail_in = bytes.size();
    stream.next_out = out.data();
    stream.avail_out = out.size();
    lzma_ret rc = lzma_code(&stream, LZMA_FINISH);
    std::size_t size = stream.total_out;
    lzma_end(&stream);
    if (rc != LZMA_STREAM_END) throw std::runtime_error("lzma compression failed");
    return size;
}

const char* compression_metadata() {
    return "lzma-alone preset=9 input=row-major-glyphs pair=min(C(xy),C(yx))";
}

double compression_distance(const Level& a, const Level& b) {
    if (a.tileset != b.tileset) throw std::invalid_argument("compression_distance: tileset mismatch");
    // Row-major glyphs, no separators; concatenation order is a compressor
    // artifact, so the pair term takes the cheaper of both orders.
    auto glyphs = [](const Level& level) {
        std::string s;
        s.reserve(level.cells.size());
        for (auto c : level.cells) s.push_back(level.tileset->glyph(c));
        return s;
    };
    const std::string xa = glyphs(a);
    const std::string xb = glyphs(b);
    const double cx = static_cast<double>(compressed_size(xa));
    const double cy = static_cast<double>(compressed_size(xb));
    const double cxy = static_cast<double>(
        std::min(compressed_size(xa + xb), compressed_size(xb + xa)));
    return (cxy - std::min(cx, cy)) / std::max(cx, cy);
}

double astar_diversity(const Level& a, const Level& b, GameId game) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("astar_diversity: dimension mismatch");
    }
    auto ra = solve_level(a, game);
    auto rb = solve_level(b, game);
    if (!ra.solvable && !rb.solvable) return 0.0;
    if (!ra.solvable || !rb.solvable) return 1.0;
    auto pa = resample_normalized(ra.trajectory, a.width, a.height);
    auto pb = resample_normalized(rb.trajectory, b.width, b.height);
    double total = 0.0;
    for (int s = 0; s < kResamplePoints; ++s) {
        double dx = pa[s].first - pb[s].first;
        double dy = pa[s].second - pb[s].second;
        total += std::sqrt(dx * dx + dy * dy);
    }
    return total / kResamplePoints / std::sqrt(2.0);
}

double astar_difficulty(const Level& level, GameId game) {
    auto result = solve_level(level, game);
    if (result.solvable) {
        return (static_cast<double>(result.expanded) - static_cast<double>(result.trajectory.size())) /
               static_cast<double>(result.expanded);
    }
    return result.expanded > 0 ? 1.0 : 0.0;
}

double leniency(const Level& level) {
    if (level.tileset->game() == GameId::Maze) {
        auto result = solve_maze(level);
        if (!result.solvable) return 0.0;

        // Reachable component of the start.
        std::vector<char> mask(level.cells.size(), 0);
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
        long reachable = 0, dead_ends = 0;
        for (int y = 0; y < level.height; ++y) {
            for (int x = 0; x < level.width; ++x) {
                if (!mask[y * level.width + x]) continue;
                ++reachable;
                bool is_start = x == 0 && y == 0;
                bool is_goal = x == level.width - 1 && y == level.height - 1;
                if (is_start || is_goal) continue;
                int open_neighbors = 0;
                static constexpr int dxs[4] = {0, 0, -1, 1};
                static constexpr int dys[4] = {-1, 1, 0, 0};
                for (int k = 0; k < 4; ++k) {
                    int nx = x + dxs[k], ny = y + dys[k];
                    if (level.in_bounds(nx, ny) && !level.solid_at(nx, ny)) ++open_neighbors;
                }
                if (open_neighbors == 1) ++dead_ends;
            }
        }
        if (reachable == 0) return 0.0;
        return 1.0 - static_cast<double>(dead_ends) / static_cast<double>(reachable);
    }

    // Mario: a column is unforgiving if it holds an enemy or has no solid
    // footing at all (a gap).
    double total = 0.0;
    for (int x = 0; x < level.width; ++x) {
        bool has_enemy = false, has_solid = false;
        for (int y = 0; y < level.height; ++y) {
            if (level.hazard_at(x, y)) has_enemy = true;
            if (level.solid_at(x, y)) has_solid = true;
        }
        total += (has_enemy || !has_solid) ? 0.0 : 1.0;
    }
    return total / level.width;
}

double pairwise_average(std::span<const Level> levels,
                        const std::function<double(const Level&, const Level&)>& metric) {
    if (levels.size() < 2) throw std::invalid_argument("pairwise_average needs at least two levels");
    double total = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        for (std::size_t j = i + 1; j < levels.size(); ++j) {
            total += metric(levels[i], levels[j]);
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    double mu = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double cohens_d(std::span<const double> sample_a, std::span<const double> sample_b) {
    if (sample_a.size() < 2) throw std::invalid_argument("cohens_d: sample_a needs >= 2 values");
    double sigma = sample_std(sample_a);
    if (sigma == 0.0) throw std::invalid_argument("cohens_d: sample_a has zero deviation");
    return (mean_of(sample_a) - mean_of(sample_b)) / sigma;
}

std::vector<BenchmarkRow> benchmark_generation(
    const std::function<void(int width, int height)>& make_level,
    std::span<const std::pair<int, int>> sizes, int trials) {
    if (trials < 3) throw std::invalid_argument("benchmark_generation: trials must be >= 3");
    std::vector<BenchmarkRow> rows;
    rows.reserve(sizes.size());
    for (const auto& [w, h] : sizes) {
        make_level(w, h);  // warm-up, discarded
        std::vector<double> seconds(trials);
        for (int t = 0; t < trials; ++t) {
            auto start = std::chrono::steady_clock::now();
            make_level(w, h);
            seconds[t] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        std::vector<double> sorted = seconds;
        std::sort(sorted.begin(), sorted.end());
        double median = trials % 2 ? sorted[trials / 2]
                                   : 0.5 * (sorted[trials / 2 - 1] + sorted[trials / 2]);
        rows.push_back({w, h, median, sample_std(seconds), trials});
    }
    return rows;
}

std::string benchmark_csv(std::span<const BenchmarkRow> rows) {
    std::ostringstream out;
    out << "size,median_s,std_s,trials\n";
    char buf[128];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%dx%d,%.9f,%.9f,%d\n", row.width, row.height,
                      row.median_seconds, row.std_seconds, row.trials);
        out << buf;
    }
    return out.str();
}

LevelSetMetrics evaluate_level_set(const std::vector<Level>& levels, GameId game,
                                   bool random_baseline_all_levels, int workers) {
    LevelSetMetrics metrics;
    metrics.level_count = static_cast<int>(levels.size());
    if (levels.empty()) return metrics;

    std::vector<char> solvable(levels.size(), 0);
    parallel_for(static_cast<int>(levels.size()), workers,
                 [&](int i) { solvable[i] = solve_level(levels[i], game).solvable ? 1 : 0; });
    for (char s : solvable) metrics.solvable_count += s;
    metrics.solvability =
        static_cast<double>(metrics.solvable_count) / static_cast<double>(levels.size());

    std::vector<const Level*> included;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (random_baseline_all_levels || solvable[i]) included.push_back(&levels[i]);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (included.empty()) {
        metrics.compression_distance = nan;
        metrics.astar_diversity = nan;
        metrics.astar_difficulty = nan;
        metrics.leniency = nan;
        return metrics;
    }

    std::vector<double> difficulty(included.size()), lenience(included.size());
    parallel_for(static_cast<int>(included.size()), workers, [&](int i) {
        difficulty[i] = astar_difficulty(*included[i], game);
        lenience[i] = leniency(*included[i]);
    });
    metrics.astar_difficulty = mean_of(difficulty);
    metrics.leniency = mean_of(lenience);

    if (included.size() < 2) {
        metrics.compression_distance = nan;
        metrics.astar_diversity = nan;
        return metrics;
    }
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < included.size(); ++i) {
        for (std::size_t j = i + 1; j < included.size(); ++j) {
            pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    }
    std::vector<double> ncd(pairs.size()), adiv(pairs.size());
    parallel_for(static_cast<int>(pairs.size()), workers, [&](int p) {
        const Level& a = *included[pairs[p].first];
        const Level& b = *included[pairs[p].second];
        ncd[p] = compression_distance(a, b);
        adiv[p] = astar_diversity(a, b, game);
    });
    metrics.compression_distance = mean_of(ncd);
    metrics.astar_diversity = mean_of(adiv);
    return metrics;
}

}  // namespace pcgnn
