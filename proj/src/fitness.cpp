#include "pcgnn/fitness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "pcgnn/parallel.hpp"

namespace pcgnn {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t genome_digest(const Genome& genome) {
    std::string text = save_genome(genome);
    std::uint64_t state = 0x6a09e667f3bcc908ULL;
    std::uint64_t h = 0;
    for (unsigned char ch : text) {
        state ^= ch;
        h ^= splitmix64_next(state);
    }
    return h;
}

}  // namespace

double solvability_fitness(const std::vector<Level>& levels, GameId game) {
    if (levels.empty()) throw std::invalid_argument("solvability_fitness: no levels");
    int solvable = 0;
    for (const auto& level : levels) solvable += solve_level(level, game).solvable ? 1 : 0;
    return static_cast<double>(solvable) / static_cast<double>(levels.size());
}

double chunk_entropy(std::span<const std::uint8_t> tiles, int n_tile_types) {
    if (tiles.empty()) throw std::invalid_argument("chunk_entropy: empty chunk");
    std::vector<int> counts(n_tile_types, 0);
    for (auto t : tiles) ++counts[t];
    double entropy = 0.0;
    for (int c : counts) {
        if (c == 0) continue;  // 0 * log 0 := 0
        double p = static_cast<double>(c) / static_cast<double>(tiles.size());
        entropy -= p * std::log2(p);
    }
    if (n_tile_types > 2) entropy /= std::log2(static_cast<double>(n_tile_types));
    return entropy;
}

double entropy_fitness(const Level& level, int chunk_edge, double desired_entropy) {
    if (chunk_edge < 1) throw std::invalid_argument("entropy_fitness: chunk_edge must be >= 1");
    const int n = level.tileset->size();
    double total = 0.0;
    int chunks = 0;
    std::vector<std::uint8_t> chunk;
    for (int cy = 0; cy < level.height; cy += chunk_edge) {
        for (int cx = 0; cx < level.width; cx += chunk_edge) {
            chunk.clear();
            for (int y = cy; y < std::min(cy + chunk_edge, level.height); ++y) {
                for (int x = cx; x < std::min(cx + chunk_edge, level.width); ++x) {
                    chunk.push_back(static_cast<std::uint8_t>(level.at(x, y)));
                }
            }
            total += chunk_entropy(chunk, n);
            ++chunks;
        }
    }
    double mean = total / chunks;
    double diff = std::abs(mean - desired_entropy);
    if (diff == 0.0) return 10.0;
    return std::min(10.0, 1.0 / diff);
}

double partial_solvability(const Level& level) {
    bool start_open = !level.solid_at(0, 0);
    bool end_open = !level.solid_at(level.width - 1, level.height - 1);
    bool connected = false;
    if (start_open && end_open) {
        // plain flood fill; the A* machinery is not needed for a yes/no
        std::vector<char> seen(level.cells.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
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
                if (!seen[nidx]) {
                    seen[nidx] = 1;
                    stack.push_back(nidx);
                }
            }
        }
        connected = seen[level.cells.size() - 1] != 0;
    }
    return ((start_open ? 1 : 0) + (end_open ? 1 : 0) + (connected ? 1 : 0)) / 3.0;
}

Rng evaluation_rng(const TrainConfig& config, const Genome& genome) {
    return Rng(derive_seed({config.master_seed, 0x4c45564bULL, genome_digest(genome)}));
}

IndividualEvaluation evaluate_individual(const Genome& genome, const TrainConfig& config, Rng& rng) {
    IndividualEvaluation eval;
    Generator generator(build_network(genome), config.generator);
    eval.levels.reserve(config.levels_per_individual);
    for (int n = 0; n < config.levels_per_individual; ++n) {
        eval.levels.push_back(generate_level(generator, config.level_width, config.level_height, rng));
    }
    eval.solvability = solvability_fitness(eval.levels, config.game);
    eval.intra = eval.levels.size() >= 2
                     ? intra_novelty(eval.levels, config.novelty.intra_k, config.novelty.distance)
                     : 0.0;
    eval.simple_fitness =
        config.weights.solvability * eval.solvability + config.weights.intra * eval.intra;
    return eval;
}

TrainResult train(const TrainConfig& config) {
    if (config.generations < 1) throw std::invalid_argument("train: generations must be >= 1");
    if (config.levels_per_individual < 1) throw std::invalid_argument("train: need at least one level");
    if (config.weights.novelty < 0 || config.weights.solvability < 0 || config.weights.intra < 0 ||
        config.weights.novelty + config.weights.solvability + config.weights.intra <= 0) {
        throw std::invalid_argument("train: weights must be nonnegative with a positive sum");
    }

    TrainResult result;
    TrainReport& report = result.report;

    const int inputs = window_input_width(config.generator);
    const int outputs = output_count_for(*config.generator.tileset);
    const int pop_size = config.neat.population_size;

    InnovationRegistry registry;
    Rng init_rng(derive_seed({config.master_seed, 0x494e4954ULL}));
    std::vector<Genome> population =
        initial_population(config.neat, inputs, outputs, registry, init_rng);

    std::vector<SpeciesState> species;
    int next_species_id = 1;
    NoveltyArchive archive;

    Genome best_genome;
    double best_fitness = -1.0;
    double best_solvability = -1.0;

    for (int gen = 0; gen < config.generations; ++gen) {
        auto phase1_start = std::chrono::steady_clock::now();

        // Phase 1: generate levels and simple fitnesses, one stream per genome.
        std::vector<IndividualEvaluation> evals(pop_size);
        parallel_for(pop_size, config.workers, [&](int i) {
            Rng rng = evaluation_rng(config, population[i]);
            evals[i] = evaluate_individual(population[i], config, rng);
        });

        // All-pairs generator distances; the diagonal never enters a score.
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(static_cast<std::size_t>(pop_size) * (pop_size - 1) / 2);
        for (int i = 0; i < pop_size; ++i) {
            for (int j = i + 1; j < pop_size; ++j) pairs.emplace_back(i, j);
        }
        std::vector<double> pair_distance(pairs.size());
        parallel_for(static_cast<int>(pairs.size()), config.workers, [&](int p) {
            pair_distance[p] = generator_distance(evals[pairs[p].first].levels,
                                                  evals[pairs[p].second].levels,
                                                  config.novelty.distance);
        });
        std::vector<std::vector<double>> distance(pop_size, std::vector<double>(pop_size, 0.0));
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            distance[pairs[p].first][pairs[p].second] = pair_distance[p];
            distance[pairs[p].second][pairs[p].first] = pair_distance[p];
        }
        std::vector<std::vector<double>> archive_distance(pop_size);
        parallel_for(pop_size, config.workers, [&](int i) {
            archive_distance[i].reserve(archive.entries.size());
            for (const auto& entry : archive.entries) {
                archive_distance[i].push_back(
                    generator_distance(evals[i].levels, entry, config.novelty.distance));
            }
        });
        double seconds_phase1 = seconds_since(phase1_start);

        // Phase 2: novelty, composite fitness, bookkeeping.
        auto phase2_start = std::chrono::steady_clock::now();
        int k = config.novelty.k_neighbors;
        int available = pop_size - 1 + static_cast<int>(archive.entries.size());
        if (k > available) {
            if (gen == 0) {
                report.warnings.push_back("novelty K clamped from " + std::to_string(k) + " to " +
                                          std::to_string(std::max(available, 1)));
            }
            k = std::max(available, 1);
        }

        std::vector<double> novelty(pop_size, 0.0);
        std::vector<double> composite(pop_size, 0.0);
        for (int i = 0; i < pop_size; ++i) {
            std::vector<double> distances;
            distances.reserve(available);
            for (int j = 0; j < pop_size; ++j) {
                if (j != i) distances.push_back(distance[i][j]);
            }
            distances.insert(distances.end(), archive_distance[i].begin(), archive_distance[i].end());
            novelty[i] = novelty_from_distances(std::move(distances), k);
            composite[i] = config.weights.solvability * evals[i].solvability +
                           config.weights.intra * evals[i].intra +
                           config.weights.novelty * novelty[i];
        }

        if (config.novelty.lambda > 0) {
            Rng archive_rng(derive_seed({config.master_seed, 0x41524348ULL, static_cast<std::uint64_t>(gen)}));
            int to_add = std::min(config.novelty.lambda, pop_size);
            std::vector<int> order(pop_size);
            for (int i = 0; i < pop_size; ++i) order[i] = i;
            for (int t = 0; t < to_add; ++t) {
                int j = t + static_cast<int>(archive_rng.below(pop_size - t));
                std::swap(order[t], order[j]);
                archive.entries.push_back(evals[order[t]].levels);
            }
        }

        int gen_best = 0;
        double sum = 0.0, worst = composite[0], solv_sum = 0.0;
        for (int i = 0; i < pop_size; ++i) {
            sum += composite[i];
            solv_sum += evals[i].solvability;
            worst = std::min(worst, composite[i]);
            if (composite[i] > composite[gen_best]) gen_best = i;
        }

        // Best-ever tracking; novelty is population-relative, so ties fall
        // back to the solvability component and then to a smaller genome.
        bool better = composite[gen_best] > best_fitness;
        if (!better && composite[gen_best] == best_fitness) {
            if (evals[gen_best].solvability > best_solvability) {
                better = true;
            } else if (evals[gen_best].solvability == best_solvability &&
                       population[gen_best].size() < best_genome.size()) {
                better = true;
            }
        }
        if (better) {
            best_genome = population[gen_best];
            best_fitness = composite[gen_best];
            best_solvability = evals[gen_best].solvability;
        }

        if (config.validate_genomes) {
            for (const auto& genome : population) {
                auto issues = validate_genome(genome);
                if (!issues.empty()) {
                    report.validator_failures += static_cast<long>(issues.size());
                    report.warnings.push_back("generation " + std::to_string(gen) +
                                              " validator: " + issues.front());
                }
            }
        }

        double seconds_phase2 = seconds_since(phase2_start);
        report.rows.push_back({gen, composite[gen_best], sum / pop_size, worst,
                               evals[gen_best].solvability, evals[gen_best].intra, novelty[gen_best],
                               seconds_phase1, seconds_phase2, solv_sum / pop_size});

        if (gen + 1 < config.generations) {
            speciate(population, species, config.neat, &next_species_id);
            Rng repro_rng(derive_seed({config.master_seed, 0x52455052ULL, static_cast<std::uint64_t>(gen)}));
            population = reproduce(species, population, composite, config.neat, registry, repro_rng,
                                   &report.warnings);
        }
    }

    result.best = best_genome;
    return result;
}

std::string train_report_csv(const TrainReport& report) {
    std::ostringstream out;
    out << "generation,best,mean,worst,best_solv,best_intra,best_novelty,seconds_phase1,seconds_phase2\n";
    char buf[256];
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f,%.6f\n",
                      row.generation, row.best, row.mean, row.worst, row.best_solv, row.best_intra,
                      row.best_novelty, row.seconds_phase1, row.seconds_phase2);
        out << buf;
    }
    return out.str();
}

}  // namespace pcgnn
