// Command-line harness: train generators, generate and evaluate levels, time
// generation, and run the direct-GA baseline. Every command echoes its fully
// resolved configuration so runs can be reproduced from the output directory.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pcgnn/config.hpp"
#include "pcgnn/directga.hpp"
#include "pcgnn/fitness.hpp"
#include "pcgnn/metrics.hpp"

namespace fs = std::filesystem;
using namespace pcgnn;

namespace {

struct CommonArgs {
    std::string out;
    std::string config_file;
    std::string preset;
    std::string game = "maze";
    std::uint64_t seed = 0;
    int workers = 1;
    bool seed_given = false;
    bool workers_given = false;
    std::vector<std::string> sets;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--out", args.out, "output directory (must exist)");
    cmd->add_option("--config", args.config_file, "key=value config file");
    cmd->add_option("--preset", args.preset, "paper, desk, directga-plus, directga-novelty");
    cmd->add_option("--game", args.game, "maze or mario");
    cmd->add_option("--seed", args.seed, "master seed")
        ->each([&args](const std::string&) { args.seed_given = true; });
    cmd->add_option("--workers", args.workers, "evaluation threads")
        ->each([&args](const std::string&) { args.workers_given = true; });
    cmd->add_option("--set", args.sets, "extra key=value override, repeatable");
}

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig config = RunConfig::defaults();
    config.set("game", args.game);
    if (!args.preset.empty()) config.apply_preset(args.preset);
    if (!args.config_file.empty()) config.apply_file(args.config_file);
    for (const auto& kv : args.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got: " + kv);
        config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed_given) config.set("seed", std::to_string(args.seed));
    if (args.workers_given) config.set("workers", std::to_string(args.workers));
    return config;
}

fs::path require_out_dir(const std::string& out) {
    if (out.empty()) throw ConfigError("--out is required");
    fs::path dir(out);
    if (!fs::is_directory(dir)) throw ConfigError("output directory does not exist: " + out);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

std::vector<std::pair<int, int>> parse_sizes(const std::string& list, GameId game, int height) {
    std::vector<std::pair<int, int>> sizes;
    std::istringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        int n = std::stoi(item);
        if (n < 2) throw ConfigError("sizes must be >= 2, got: " + item);
        // mazes sweep squares, platformer levels sweep width at fixed height
        sizes.emplace_back(n, game == GameId::Maze ? n : height);
    }
    if (sizes.empty()) throw ConfigError("empty size list");
    return sizes;
}

int cmd_train(const CommonArgs& args) {
    RunConfig config = resolve_config(args);
    fs::path out = require_out_dir(args.out);
    write_file(out / "resolved_config.txt", config.serialize());

    TrainResult result = train(config.train_config());
    save_genome_file(result.best, (out / "genome.txt").string());
    write_file(out / "train_report.csv", train_report_csv(result.report));
    for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "trained " << config.get("game") << " generator, " << result.report.rows.size()
              << " generations -> " << (out / "genome.txt").string() << '\n';
    return 0;
}

int cmd_generate(const CommonArgs& args, const std::string& genome_path, int width, int height,
                 int count) {
    RunConfig config = resolve_config(args);
    fs::path out = require_out_dir(args.out);
    Genome genome = load_genome_file(genome_path);
    Generator generator(build_network(genome), config.generator_settings());

    write_file(out / "resolved_config.txt", config.serialize());
    std::ostringstream manifest;
    manifest << "file,seed,width,height,generation_seconds\n";
    char name[64], timing[64];
    for (int i = 0; i < count; ++i) {
        std::uint64_t level_seed = derive_seed({config.get_u64("seed"), static_cast<std::uint64_t>(i)});
        Rng rng(level_seed);
        auto start = std::chrono::steady_clock::now();
        Level level = generate_level(generator, width, height, rng);
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::snprintf(name, sizeof name, "level_%03d.txt", i);
        write_file(out / name, serialize_level(level));
        std::snprintf(timing, sizeof timing, "%.9f", seconds);
        manifest << name << ',' << level_seed << ',' << width << ',' << height << ',' << timing
                 << '\n';
    }
    write_file(out / "manifest.csv", manifest.str());
    std::cout << "generated " << count << " levels -> " << out.string() << '\n';
    return 0;
}

std::vector<Level> load_level_dir(const fs::path& dir, const Tileset& tileset,
                                  std::vector<std::string>* errors) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("level directory does not exist: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt" &&
            entry.path().filename().string().rfind("level", 0) == 0) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<Level> levels;
    for (const auto& file : files) {
        try {
            levels.push_back(parse_level(read_file(file), tileset));
        } catch (const std::exception& e) {
            if (errors) errors->push_back(file.string() + ": " + e.what());
        }
    }
    return levels;
}

int cmd_evaluate(const CommonArgs& args, const std::vector<std::string>& level_dirs,
                 bool random_baseline, const std::string& dump_distances) {
    RunConfig config = resolve_config(args);
    fs::path out = require_out_dir(args.out);
    GameId game = config.game();
    const Tileset& tileset = tileset_for(game);
    int workers = config.get_int("workers");

    std::ostringstream per_seed;
    per_seed << "metric,seed,value\n";
    std::map<std::string, std::vector<double>> by_metric;

    for (std::size_t s = 0; s < level_dirs.size(); ++s) {
        std::vector<std::string> errors;
        std::vector<Level> levels = load_level_dir(level_dirs[s], tileset, &errors);
        for (const auto& e : errors) std::cerr << "warning: skipped " << e << '\n';
        if (levels.empty()) {
            std::cerr << "warning: no readable levels in " << level_dirs[s] << '\n';
            continue;
        }
        LevelSetMetrics m = evaluate_level_set(levels, game, random_baseline, workers);
        auto emit = [&](const char* metric, double value) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", value);
            per_seed << metric << ',' << s << ',' << buf << '\n';
            by_metric[metric].push_back(value);
        };
        emit("solvability", m.solvability);
        emit("solvable_count", m.solvable_count);
        emit("compression_distance", m.compression_distance);
        emit("astar_diversity", m.astar_diversity);
        emit("astar_difficulty", m.astar_difficulty);
        emit("leniency", m.leniency);

        if (!dump_distances.empty() && s == 0) {
            auto id = distance_function_from_name(dump_distances);
            write_file(out / "distances.csv", distance_matrix_csv(levels, id));
        }
    }
    if (by_metric.empty()) throw std::runtime_error("no levels evaluated");

    std::ostringstream summary;
    summary << "metric,mean,std,n\n";
    for (const auto& [metric, values] : by_metric) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%zu\n", metric.c_str(), mean_of(values),
                      sample_std(values), values.size());
        summary << buf;
    }
    write_file(out / "metrics.csv", per_seed.str());
    write_file(out / "summary.csv", summary.str());
    write_file(out / "metadata.txt", std::string("compressor: ") + compression_metadata() + "\n" +
                                         "random_baseline: " + (random_baseline ? "true" : "false") +
                                         "\n");
    std::cout << "evaluated " << level_dirs.size() << " level set(s) -> " << out.string() << '\n';
    return 0;
}

int cmd_benchmark(const CommonArgs& args, const std::string& genome_path, const std::string& method,
                  const std::string& sizes_list, int trials, const std::string& gens_sweep) {
    RunConfig config = resolve_config(args);
    fs::path out = require_out_dir(args.out);
    GameId game = config.game();
    auto sizes = parse_sizes(sizes_list, game, config.get_int("level_height"));

    std::uint64_t seed = config.get_u64("seed");
    std::uint64_t counter = 0;
    std::function<void(int, int)> make_level;
    std::shared_ptr<Generator> generator;
    DirectGAConfig dga = config.directga_config();
    const Tileset* tileset = &tileset_for(game);

    if (method == "pcgnn") {
        if (genome_path.empty()) throw ConfigError("--genome is required for --method pcgnn");
        Genome genome = load_genome_file(genome_path);
        generator = std::make_shared<Generator>(build_network(genome), config.generator_settings());
        make_level = [&, generator](int w, int h) {
            Rng rng(derive_seed({seed, counter++}));
            generate_level(*generator, w, h, rng);
        };
    } else if (method == "directga") {
        make_level = [&](int w, int h) {
            Rng rng(derive_seed({seed, counter++}));
            directga_evolve(dga, w, h, *tileset, rng);
        };
    } else {
        throw ConfigError("--method must be pcgnn or directga, got: " + method);
    }

    auto rows = benchmark_generation(make_level, sizes, trials);
    write_file(out / "benchmark.csv", benchmark_csv(rows));
    write_file(out / "resolved_config.txt", config.serialize());

    if (!gens_sweep.empty()) {
        if (method != "directga") throw ConfigError("--generations-sweep needs --method directga");
        std::ostringstream sweep;
        sweep << "generations,median_s,std_s,trials\n";
        std::istringstream in(gens_sweep);
        std::string item;
        while (std::getline(in, item, ',')) {
            dga.generations = std::stoi(item);
            std::vector<std::pair<int, int>> one_size{sizes.front()};
            auto r = benchmark_generation(make_level, one_size, trials);
            char buf[128];
            std::snprintf(buf, sizeof buf, "%d,%.9f,%.9f,%d\n", dga.generations, r[0].median_seconds,
                          r[0].std_seconds, trials);
            sweep << buf;
        }
        write_file(out / "generations_sweep.csv", sweep.str());
    }
    std::cout << "benchmarked " << sizes.size() << " size(s) -> " << out.string() << '\n';
    return 0;
}

int cmd_baseline(const CommonArgs& args, int count, int width, int height) {
    RunConfig config = resolve_config(args);
    fs::path out = require_out_dir(args.out);
    if (width == 0) width = config.get_int("level_width");
    if (height == 0) height = config.get_int("level_height");
    DirectGAConfig dga = config.directga_config();
    const Tileset& tileset = tileset_for(config.game());

    write_file(out / "resolved_config.txt", config.serialize());
    std::ostringstream manifest;
    manifest << "file,seed,width,height,generation_seconds\n";
    char name[64], timing[64];
    for (int i = 0; i < count; ++i) {
        std::uint64_t level_seed = derive_seed({config.get_u64("seed"), static_cast<std::uint64_t>(i)});
        Rng rng(level_seed);
        auto start = std::chrono::steady_clock::now();
        Level level = directga_evolve(dga, width, height, tileset, rng);
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::snprintf(name, sizeof name, "level_%03d.txt", i);
        write_file(out / name, serialize_level(level));
        std::snprintf(timing, sizeof timing, "%.9f", seconds);
        manifest << name << ',' << level_seed << ',' << width << ',' << height << ',' << timing
                 << '\n';
    }
    write_file(out / "manifest.csv", manifest.str());
    std::cout << "evolved " << count << " baseline levels -> " << out.string() << '\n';
    return 0;
}

int cmd_render(const CommonArgs& args, const std::string& level_path, const std::string& pgm_path,
               const std::string& trajectory_path) {
    RunConfig config = resolve_config(args);
    GameId game = config.game();
    Level level = parse_level(read_file(level_path), tileset_for(game));
    if (!pgm_path.empty()) write_file(pgm_path, render_pgm(level));
    if (!trajectory_path.empty()) {
        write_file(trajectory_path, trajectory_csv(solve_level(level, game)));
    }
    std::cout << "rendered " << level_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PCGNN: neuroevolved tile level generators with novelty search"};
    app.require_subcommand(1);

    CommonArgs train_args, gen_args, eval_args, bench_args, base_args, render_args;

    auto* train_cmd = app.add_subcommand("train", "evolve a level generator");
    add_common_options(train_cmd, train_args);

    auto* gen_cmd = app.add_subcommand("generate", "generate levels from a trained genome");
    add_common_options(gen_cmd, gen_args);
    std::string gen_genome;
    int gen_width = 14, gen_height = 14, gen_count = 1;
    gen_cmd->add_option("--genome", gen_genome, "genome file")->required();
    gen_cmd->add_option("--width", gen_width, "level width");
    gen_cmd->add_option("--height", gen_height, "level height");
    gen_cmd->add_option("--count", gen_count, "number of levels");

    auto* eval_cmd = app.add_subcommand("evaluate", "score a directory of level files");
    add_common_options(eval_cmd, eval_args);
    std::vector<std::string> eval_dirs;
    bool eval_random_baseline = false;
    std::string eval_dump;
    eval_cmd->add_option("--levels", eval_dirs, "level directories, one per seed")->required();
    eval_cmd->add_flag("--random-baseline", eval_random_baseline,
                       "aggregate over all levels, not only solvable ones");
    eval_cmd->add_option("--dump-distances", eval_dump,
                         "also write a pairwise distance matrix for this distance function");

    auto* bench_cmd = app.add_subcommand("benchmark", "time level generation per size");
    add_common_options(bench_cmd, bench_args);
    std::string bench_genome, bench_method = "pcgnn", bench_sizes = "14", bench_gens_sweep;
    int bench_trials = 5;
    bench_cmd->add_option("--genome", bench_genome, "genome file (pcgnn method)");
    bench_cmd->add_option("--method", bench_method, "pcgnn or directga");
    bench_cmd->add_option("--sizes", bench_sizes, "comma-separated sizes");
    bench_cmd->add_option("--trials", bench_trials, "timed trials per size");
    bench_cmd->add_option("--generations-sweep", bench_gens_sweep,
                          "comma-separated generation counts (directga)");

    auto* base_cmd = app.add_subcommand("baseline", "evolve levels with the direct GA");
    add_common_options(base_cmd, base_args);
    int base_count = 1, base_width = 0, base_height = 0;
    base_cmd->add_option("--count", base_count, "number of independent evolutions");
    base_cmd->add_option("--width", base_width, "level width (default: config)");
    base_cmd->add_option("--height", base_height, "level height (default: config)");

    auto* render_cmd = app.add_subcommand("render", "render a level file to PGM");
    add_common_options(render_cmd, render_args);
    std::string render_level, render_pgm_path, render_traj;
    render_cmd->add_option("--level", render_level, "level file")->required();
    render_cmd->add_option("--pgm", render_pgm_path, "output PGM path");
    render_cmd->add_option("--trajectory", render_traj, "also write the solver trajectory CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*train_cmd) return cmd_train(train_args);
        if (*gen_cmd) return cmd_generate(gen_args, gen_genome, gen_width, gen_height, gen_count);
        if (*eval_cmd) return cmd_evaluate(eval_args, eval_dirs, eval_random_baseline, eval_dump);
        if (*bench_cmd) {
            return cmd_benchmark(bench_args, bench_genome, bench_method, bench_sizes, bench_trials,
                                 bench_gens_sweep);
        }
        if (*base_cmd) return cmd_baseline(base_args, base_count, base_width, base_height);
        if (*render_cmd) return cmd_render(render_args, render_level, render_pgm_path, render_traj);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
