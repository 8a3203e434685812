#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pcgnn/diversity.hpp"
#include "pcgnn/solvers.hpp"

using namespace pcgnn;

namespace {

Level maze_from(const std::string& text) { return parse_level(text, maze_tileset()); }

Level random_maze(Rng& rng, int w = 8, int h = 8) { return random_level(w, h, maze_tileset(), rng); }

// Straight-line reimplementation of flood fill + rewrite for the reachable
// variant, kept independent of the library path.
Level oracle_rewrite(const Level& level) {
    std::vector<char> seen(level.cells.size(), 0);
    std::vector<int> stack;
    if (!level.solid_at(0, 0)) {
        seen[0] = 1;
        stack.push_back(0);
    }
    while (!stack.empty()) {
        int idx = stack.back();
        stack.pop_back();
        int x = idx % level.width, y = idx / level.width;
        const int dx[4] = {0, 0, 1, -1}, dy[4] = {1, -1, 0, 0};
        for (int k = 0; k < 4; ++k) {
            int nx = x + dx[k], ny = y + dy[k];
            if (nx < 0 || ny < 0 || nx >= level.width || ny >= level.height) continue;
            int nidx = ny * level.width + nx;
            if (!seen[nidx] && level.cells[nidx] == 0) {
                seen[nidx] = 1;
                stack.push_back(nidx);
            }
        }
    }
    Level out = level;
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
        if (out.cells[i] == 0 && !seen[i]) out.cells[i] = 1;
    }
    return out;
}

// Independent 30-point resampler in raw tile coordinates.
std::vector<std::pair<double, double>> oracle_resample(const std::vector<std::pair<int, int>>& pts) {
    std::vector<std::pair<double, double>> out;
    for (int s = 0; s < 30; ++s) {
        double t = (pts.size() - 1) * static_cast<double>(s) / 29.0;
        std::size_t lo = std::min<std::size_t>(static_cast<std::size_t>(t), pts.size() - 2);
        double frac = t - static_cast<double>(lo);
        out.emplace_back(pts[lo].first + frac * (pts[lo + 1].first - pts[lo].first),
                         pts[lo].second + frac * (pts[lo + 1].second - pts[lo].second));
    }
    return out;
}

}  // namespace

TEST_CASE("visual diversity counts differing cells") {
    Level a = maze_from("..\n..");
    Level b = maze_from("##\n##");
    CHECK(visual_diversity(a, a) == 0.0);
    CHECK(visual_diversity(a, b) == 1.0);
    Level c = maze_from("#.\n#.");
    CHECK(visual_diversity(a, c) == 0.5);
    CHECK_THROWS_AS(visual_diversity(a, maze_from("...\n...")), std::invalid_argument);
}

TEST_CASE("reachable visual diversity ignores sealed chambers") {
    // the bottom-right chamber is sealed in both levels and differs between them
    Level a = maze_from("..#.\n..#.\n####\n..#.");
    Level b = maze_from("..#.\n..#.\n####\n..##");
    CHECK(visual_diversity(a, b) > 0.0);
    CHECK(visual_diversity_reachable(a, b) == 0.0);
    CHECK(visual_diversity_reachable(a, a) == 0.0);
}

TEST_CASE("reachable visual diversity matches a hand oracle on random pairs") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        Level a = random_maze(rng, 4, 4);
        Level b = random_maze(rng, 4, 4);
        double expected = visual_diversity(oracle_rewrite(a), oracle_rewrite(b));
        CHECK(visual_diversity_reachable(a, b) == expected);
    }
}

TEST_CASE("euclidean distance normalizes by the maximal norm") {
    Level a = maze_from("..\n..");
    Level b = maze_from("##\n##");
    CHECK(euclidean_distance(a, a) == 0.0);
    CHECK(euclidean_distance(a, b) == doctest::Approx(1.0));
    Level c = maze_from("#.\n..");
    CHECK(euclidean_distance(a, c) == doctest::Approx(0.5));  // 1 / (1 * sqrt(4))
}

TEST_CASE("path distance compares interpolated shortest paths") {
    // top-edge route vs left-edge route through 4x4 corridors
    Level top = maze_from("....\n###.\n###.\n###.");
    Level left = maze_from(".###\n.###\n.###\n....");
    CHECK(path_distance(top, top) == 0.0);

    auto ra = solve_maze(top), rb = solve_maze(left);
    REQUIRE(ra.solvable);
    REQUIRE(rb.solvable);
    auto pa = oracle_resample(ra.trajectory);
    auto pb = oracle_resample(rb.trajectory);
    double manhattan = 0.0;
    for (int s = 0; s < 30; ++s) {
        manhattan += std::abs(pa[s].first - pb[s].first) + std::abs(pa[s].second - pb[s].second);
    }
    double expected = manhattan / 30.0 / 6.0;  // width + height - 2
    CHECK(path_distance(top, left) == doctest::Approx(expected));
    CHECK(path_distance(top, left) > 0.0);
}

TEST_CASE("path distance treats unsolvable levels as maximally novel") {
    Level open = maze_from("....\n....\n....\n....");
    Level blocked = maze_from("#...\n....\n....\n....");
    CHECK(path_distance(open, blocked) == 1.0);
    CHECK(path_distance(blocked, blocked) == 0.0);  // identical levels stay at distance zero
}

TEST_CASE("js distance: hand-computed overlap of two 2-cell supports") {
    // reachable sets {(0,0),(1,0)} and {(0,0),(0,1)} share one cell
    Level a = maze_from("..#\n###\n###");
    Level b = maze_from(".##\n.##\n###");
    CHECK(js_distance(a, a) == 0.0);
    CHECK(js_distance(a, b) == doctest::Approx(0.5));
}

TEST_CASE("js distance approaches 1 as supports separate") {
    // Reachable sets always contain the start (or degenerate to a point mass
    // there), so two supports can never be fully disjoint; with large sets
    // sharing only the start, the divergence approaches its maximum.
    int n = 20;
    Level row(n * 2, 3, maze_tileset(), 1);
    for (int x = 0; x < n; ++x) row.set(x, 0, 0);  // top strip, reachable
    Level column(n * 2, 3, maze_tileset(), 1);
    column.set(0, 0, 0);
    column.set(0, 1, 0);
    column.set(0, 2, 0);
    for (int x = 0; x < n * 2 - 1; ++x) column.set(x, 2, 0);  // bottom strip
    double d = js_distance(row, column);
    CHECK(d > 0.9);
    CHECK(d <= 1.0);
}

TEST_CASE("window distance: identical levels are zero, full difference is one") {
    Level a = maze_from("....\n....\n....\n....");
    Level walls = maze_from("####\n####\n####\n####");
    CHECK(window_distance(a, a, WindowMode::AllReachable) == 0.0);
    CHECK(window_distance(a, a, WindowMode::ShortestPath) == 0.0);
    CHECK(window_distance(a, walls, WindowMode::AllReachable) == 1.0);
    CHECK(window_distance(a, walls, WindowMode::ShortestPath) == 1.0);
}

TEST_CASE("window distance matches a hand enumeration on a 4x4 pair") {
    Level a = maze_from("..##\n..##\n####\n####");
    Level b = maze_from("..##\n.###\n####\n####");
    // reachable sets: a -> {(0,0),(1,0),(0,1),(1,1)}, b -> {(0,0),(1,0),(0,1)}
    // union has 4 anchors; (1,1) only in a contributes 1; shared anchors
    // compare their 3x3 blocks: each block contains the single differing cell
    double d00 = 1.0 / 9.0, d10 = 1.0 / 9.0, d01 = 1.0 / 9.0;
    double expected = (d00 + d10 + d01 + 1.0) / 4.0;
    CHECK(window_distance(a, b, WindowMode::AllReachable) == doctest::Approx(expected));
}

TEST_CASE("hash average distance: constant images hash identically") {
    Level empty(14, 14, maze_tileset(), 0);
    Level walls(14, 14, maze_tileset(), 1);
    CHECK(hash_average_distance(empty, empty) == 0.0);
    // the known blindness of average hashing: two flat images collide
    CHECK(hash_average_distance(empty, walls) == 0.0);
}

TEST_CASE("hash average distance matches an independent pipeline on 16x16") {
    Level checker(16, 16, maze_tileset());
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) checker.set(x, y, static_cast<std::uint8_t>((x + y) % 2));
    }
    Level empty(16, 16, maze_tileset(), 0);

    // independent reimplementation: 2x2 mean pooling, threshold at the mean
    auto oracle_hash = [](const Level& level) {
        double gray[64];
        for (int by = 0; by < 8; ++by) {
            for (int bx = 0; bx < 8; ++bx) {
                double sum = 0;
                for (int y = 2 * by; y < 2 * by + 2; ++y) {
                    for (int x = 2 * bx; x < 2 * bx + 2; ++x) sum += level.at(x, y);
                }
                gray[by * 8 + bx] = sum / 4.0;
            }
        }
        double mean = 0;
        for (double v : gray) mean += v;
        mean /= 64;
        std::uint64_t h = 0;
        for (int i = 0; i < 64; ++i) {
            if (gray[i] > mean) h |= std::uint64_t{1} << i;
        }
        return h;
    };
    std::uint64_t ha = oracle_hash(checker), hb = oracle_hash(empty);
    int bits = 0;
    for (int i = 0; i < 64; ++i) bits += ((ha ^ hb) >> i) & 1;
    CHECK(hash_average_distance(checker, empty) == doctest::Approx(bits / 64.0));
    CHECK(average_hash(checker) == ha);
}

TEST_CASE("generator distance averages positional pairs") {
    Rng rng(22);
    std::vector<Level> a{random_maze(rng), random_maze(rng), random_maze(rng)};
    std::vector<Level> b{random_maze(rng), random_maze(rng), random_maze(rng)};
    double expected = (visual_diversity(a[0], b[0]) + visual_diversity(a[1], b[1]) +
                       visual_diversity(a[2], b[2])) /
                      3.0;
    CHECK(generator_distance(a, b, DistanceFunctionId::VisualDiversity) == doctest::Approx(expected));
    CHECK(generator_distance(a, a, DistanceFunctionId::VisualDiversity) == 0.0);

    std::vector<Level> one{a[0]};
    std::vector<Level> other{b[0]};
    CHECK(generator_distance(one, other, DistanceFunctionId::VisualDiversity) ==
          visual_diversity(a[0], b[0]));
    CHECK_THROWS_AS(generator_distance(one, b, DistanceFunctionId::VisualDiversity),
                    std::invalid_argument);
}

TEST_CASE("novelty scores: hand-set distances with K=2") {
    // 1x10 rows with pairwise visual diversities .2, .6, .4
    Level l1 = maze_from("..........");
    Level l2 = maze_from("##........");
    Level l3 = maze_from("######....");
    REQUIRE(visual_diversity(l1, l2) == doctest::Approx(0.2));
    REQUIRE(visual_diversity(l1, l3) == doctest::Approx(0.6));
    REQUIRE(visual_diversity(l2, l3) == doctest::Approx(0.4));

    std::vector<std::vector<Level>> population{{l1}, {l2}, {l3}};
    NoveltyArchive archive;
    NoveltyConfig config{2, 0, DistanceFunctionId::VisualDiversity, 1};
    Rng rng(23);
    auto scores = novelty_scores(population, archive, config, rng);
    REQUIRE(scores.size() == 3);
    CHECK(scores[0] == doctest::Approx(0.4));
    CHECK(scores[1] == doctest::Approx(0.3));
    CHECK(scores[2] == doctest::Approx(0.5));
    CHECK(archive.entries.empty());  // lambda = 0 leaves the archive alone
}

TEST_CASE("novelty scores: identical individuals score zero") {
    Rng rng(24);
    Level l = random_maze(rng);
    std::vector<std::vector<Level>> population{{l}, {l}};
    NoveltyArchive archive;
    NoveltyConfig config{1, 0, DistanceFunctionId::VisualDiversity, 1};
    auto scores = novelty_scores(population, archive, config, rng);
    CHECK(scores[0] == 0.0);
    CHECK(scores[1] == 0.0);
}

TEST_CASE("novelty archive grows by exactly lambda per call") {
    Rng rng(25);
    std::vector<std::vector<Level>> population;
    for (int i = 0; i < 6; ++i) population.push_back({random_maze(rng)});
    NoveltyArchive archive;
    NoveltyConfig config{3, 2, DistanceFunctionId::VisualDiversity, 1};
    for (int generation = 1; generation <= 4; ++generation) {
        novelty_scores(population, archive, config, rng);
        CHECK(archive.entries.size() == static_cast<std::size_t>(2 * generation));
    }
}

TEST_CASE("novelty K is clamped with a warning for tiny populations") {
    Rng rng(26);
    std::vector<std::vector<Level>> population{{random_maze(rng)}, {random_maze(rng)}};
    NoveltyArchive archive;
    NoveltyConfig config{15, 0, DistanceFunctionId::VisualDiversity, 1};
    std::vector<std::string> warnings;
    auto scores = novelty_scores(population, archive, config, rng, &warnings);
    CHECK(scores.size() == 2);
    CHECK(!warnings.empty());
}

TEST_CASE("a duplicate of an individual never raises its novelty") {
    Rng rng(27);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<Level>> population;
        for (int i = 0; i < 5; ++i) population.push_back({random_maze(rng)});
        NoveltyConfig config{3, 0, DistanceFunctionId::VisualDiversity, 1};
        NoveltyArchive archive_a, archive_b;
        auto before = novelty_scores(population, archive_a, config, rng);
        auto with_dup = population;
        with_dup.push_back(population[0]);  // duplicate of individual 0
        auto after = novelty_scores(with_dup, archive_b, config, rng);
        CHECK(after[0] <= before[0] + 1e-15);
    }
}

TEST_CASE("intra novelty: duplicates score zero, two levels reduce to their distance") {
    Rng rng(28);
    Level l = random_maze(rng);
    std::vector<Level> duplicates{l, l, l};
    CHECK(intra_novelty(duplicates, 2, DistanceFunctionId::VisualDiversity) == 0.0);

    Level other = random_maze(rng);
    std::vector<Level> pair{l, other};
    CHECK(intra_novelty(pair, 5, DistanceFunctionId::VisualDiversity) ==
          doctest::Approx(visual_diversity(l, other)));

    std::vector<Level> single{l};
    CHECK_THROWS_AS(intra_novelty(single, 1, DistanceFunctionId::VisualDiversity),
                    std::invalid_argument);
}

TEST_CASE("intra novelty matches a brute-force oracle on four levels") {
    Rng rng(29);
    std::vector<Level> levels{random_maze(rng), random_maze(rng), random_maze(rng),
                              random_maze(rng)};
    const int k = 2;
    double expected = 0.0;
    for (int i = 0; i < 4; ++i) {
        std::vector<double> d;
        for (int j = 0; j < 4; ++j) {
            if (j != i) d.push_back(visual_diversity(levels[i], levels[j]));
        }
        std::sort(d.begin(), d.end());
        expected += (d[0] + d[1]) / k;
    }
    expected /= 4.0;
    CHECK(intra_novelty(levels, k, DistanceFunctionId::VisualDiversity) == doctest::Approx(expected));
}

TEST_CASE("distance axioms hold for every function on random pairs") {
    Rng rng(30);
    for (int trial = 0; trial < 100; ++trial) {
        Level a = random_maze(rng, 6, 6);
        Level b = random_maze(rng, 6, 6);
        for (auto id :
             {DistanceFunctionId::VisualDiversity, DistanceFunctionId::VisualDiversityReachable,
              DistanceFunctionId::Euclidean, DistanceFunctionId::Path, DistanceFunctionId::JS,
              DistanceFunctionId::Window, DistanceFunctionId::WindowV2,
              DistanceFunctionId::HashAverage}) {
            CAPTURE(distance_function_name(id));
            CHECK(level_distance(id, a, a) == 0.0);
            double ab = level_distance(id, a, b);
            CHECK(ab == level_distance(id, b, a));
            CHECK(ab >= 0.0);
            CHECK(ab <= 1.0);
        }
    }
}

TEST_CASE("distance matrix CSV covers the upper triangle") {
    Rng rng(31);
    std::vector<Level> levels{random_maze(rng), random_maze(rng), random_maze(rng)};
    std::string csv = distance_matrix_csv(levels, DistanceFunctionId::VisualDiversity);
    CHECK(csv.rfind("i,j,distance\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 pairs
}

TEST_CASE("distance function names round-trip") {
    for (auto id :
         {DistanceFunctionId::VisualDiversity, DistanceFunctionId::VisualDiversityReachable,
          DistanceFunctionId::Euclidean, DistanceFunctionId::Path, DistanceFunctionId::JS,
          DistanceFunctionId::Window, DistanceFunctionId::WindowV2, DistanceFunctionId::HashAverage}) {
        CHECK(distance_function_from_name(distance_function_name(id)) == id);
    }
    CHECK_THROWS_AS(distance_function_from_name("nope"), std::invalid_argument);
}
