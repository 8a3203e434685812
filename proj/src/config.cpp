#include "pcgnn/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pcgnn {
namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    auto end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    return s.substr(begin, end - begin + 1);
}

}  // namespace

const std::vector<ConfigEntry>& config_schema() {
    static const std::vector<ConfigEntry> schema = {
        {"game", "maze", "maze or mario"},
        {"seed", "0", "master seed for the whole run"},
        {"workers", "1", "evaluation threads; results do not depend on this"},
        {"level_width", "14", "level width in tiles"},
        {"level_height", "14", "level height in tiles"},
        {"context_size", "1", "window radius fed to the network"},
        {"predict_size", "1", "tiles predicted per query (only 1 supported)"},
        {"num_random_vars", "4", "fresh U(-1,1) noise inputs per query"},
        {"perturb_size", "0.1565", "U(-p,p) noise added to every network input"},
        {"one_hot_inputs", "false", "one-hot tile encoding instead of scalar"},
        {"population_size", "50", "genomes per generation"},
        {"generations", "200", "training generations"},
        {"levels_per_individual", "24", "levels generated per fitness evaluation"},
        {"c1", "1", "compatibility coefficient for excess genes"},
        {"c2", "1", "compatibility coefficient for disjoint genes"},
        {"c3", "0.4", "compatibility coefficient for mean weight difference"},
        {"compatibility_threshold", "3", "species membership radius"},
        {"add_node_prob", "0.03", "probability of splitting a connection"},
        {"add_conn_prob", "0.1", "probability of adding a connection"},
        {"weight_mutate_rate", "0.8", "per-connection perturbation probability"},
        {"weight_replace_rate", "0.1", "per-connection replacement probability"},
        {"weight_perturb_span", "0.5", "uniform perturbation half-width"},
        {"survival_fraction", "0.2", "top fraction of a species eligible as parents"},
        {"elitism", "2", "genomes copied unchanged per species"},
        {"stagnation_limit", "15", "generations without improvement before a species is dropped"},
        {"novelty_k", "15", "nearest neighbours in the novelty score"},
        {"lambda", "0", "individuals archived per generation"},
        {"distance_function", "visual_diversity_reachable",
         "visual_diversity, visual_diversity_reachable, euclidean, path, js, window, window_v2, "
         "hash_average"},
        {"intra_k", "10", "nearest siblings in the intra-novelty score"},
        {"w_novelty", "0.399", "novelty weight in the composite fitness"},
        {"w_solvability", "0.202", "solvability weight in the composite fitness"},
        {"w_intra", "0.399", "intra-novelty weight in the composite fitness"},
        {"validate_genomes", "false", "run the structural validator every generation"},
        {"dga_population_size", "100", "baseline population size"},
        {"dga_generations", "100", "baseline generations per level"},
        {"dga_desired_entropy", "1", "entropy target in [0,1]"},
        {"dga_chunk_edge", "7", "entropy chunk edge in tiles"},
        {"dga_use_partial_solvability", "true", "include the partial-solvability term"},
        {"dga_use_novelty", "false", "include population novelty"},
        {"dga_w_entropy", "0.5", "entropy fitness weight"},
        {"dga_w_psolv", "0.5", "partial solvability weight"},
        {"dga_w_novelty", "0", "novelty weight"},
        {"dga_mutation_prob", "0.2", "per-gene mutation probability"},
        {"dga_elitism", "1", "individuals copied unchanged per generation"},
        {"dga_novelty_k", "15", "nearest neighbours for baseline novelty"},
        {"dga_lambda", "1", "baseline archive additions per generation"},
    };
    return schema;
}

RunConfig RunConfig::defaults() {
    RunConfig config;
    for (const auto& entry : config_schema()) config.values_[entry.key] = entry.default_value;
    return config;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key: " + key);
    it->second = trim(value);
}

void RunConfig::apply_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key=value");
        }
        std::string key = trim(stripped.substr(0, eq));
        try {
            set(key, stripped.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void RunConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_text(buf.str(), path);
}

std::vector<std::string> preset_names() {
    return {"paper", "desk", "directga-plus", "directga-novelty"};
}

void RunConfig::apply_preset(const std::string& name) {
    auto set_all = [&](std::initializer_list<std::pair<const char*, const char*>> kv) {
        for (const auto& [k, v] : kv) set(k, v);
    };
    const bool mario = game() == GameId::Mario;
    if (name == "paper") {
        if (mario) {
            set_all({{"level_width", "114"},
                     {"level_height", "14"},
                     {"perturb_size", "0"},
                     {"one_hot_inputs", "true"},
                     {"population_size", "100"},
                     {"generations", "150"},
                     {"levels_per_individual", "6"},
                     {"novelty_k", "15"},
                     {"lambda", "0"},
                     {"distance_function", "visual_diversity"},
                     {"intra_k", "2"},
                     {"w_novelty", "0.25"},
                     {"w_solvability", "0.50"},
                     {"w_intra", "0.25"}});
        } else {
            set_all({{"level_width", "14"},
                     {"level_height", "14"},
                     {"perturb_size", "0.1565"},
                     {"one_hot_inputs", "false"},
                     {"population_size", "50"},
                     {"generations", "200"},
                     {"levels_per_individual", "24"},
                     {"novelty_k", "15"},
                     {"lambda", "0"},
                     {"distance_function", "visual_diversity_reachable"},
                     {"intra_k", "10"},
                     {"w_novelty", "0.399"},
                     {"w_solvability", "0.202"},
                     {"w_intra", "0.399"}});
        }
    } else if (name == "desk") {
        // Budget-reduced runs for quick end-to-end checks. At a tenth of the
        // search budget the solvability signal needs more weight to converge,
        // so the maze weights shift from .399/.202/.399 to .25/.50/.25.
        apply_preset("paper");
        if (mario) {
            set_all({{"population_size", "20"},
                     {"generations", "30"},
                     {"levels_per_individual", "3"},
                     {"level_width", "56"}});
        } else {
            set_all({{"population_size", "20"},
                     {"generations", "50"},
                     {"levels_per_individual", "12"},
                     {"w_novelty", "0.25"},
                     {"w_solvability", "0.50"},
                     {"w_intra", "0.25"}});
        }
    } else if (name == "directga-plus") {
        set_all({{"dga_population_size", "100"},
                 {"dga_generations", "100"},
                 {"dga_desired_entropy", "1"},
                 {"dga_use_partial_solvability", "true"},
                 {"dga_use_novelty", "false"},
                 {"dga_w_entropy", "0.5"},
                 {"dga_w_psolv", "0.5"},
                 {"dga_w_novelty", "0"}});
    } else if (name == "directga-novelty") {
        set_all({{"dga_population_size", "50"},
                 {"dga_generations", "100"},
                 {"dga_desired_entropy", "0"},
                 {"dga_use_partial_solvability", "true"},
                 {"dga_use_novelty", "true"},
                 {"dga_w_entropy", "0.33"},
                 {"dga_w_psolv", "0.33"},
                 {"dga_w_novelty", "0.33"},
                 {"dga_novelty_k", "15"},
                 {"dga_lambda", "1"}});
    } else {
        throw ConfigError("unknown preset: " + name);
    }
}

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key: " + key);
    return it->second;
}

int RunConfig::get_int(const std::string& key) const {
    try {
        return std::stoi(get(key));
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer: " + get(key));
    }
}

double RunConfig::get_double(const std::string& key) const {
    try {
        return std::stod(get(key));
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a number: " + get(key));
    }
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key " + key + " is not a boolean: " + v);
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
    try {
        return std::stoull(get(key));
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an unsigned integer: " + get(key));
    }
}

GameId RunConfig::game() const {
    const std::string& v = get("game");
    if (v == "maze") return GameId::Maze;
    if (v == "mario") return GameId::Mario;
    throw ConfigError("config key game must be maze or mario, got: " + v);
}

GeneratorSettings RunConfig::generator_settings() const {
    GeneratorSettings settings;
    settings.context_size = get_int("context_size");
    settings.predict_size = get_int("predict_size");
    settings.num_random_vars = get_int("num_random_vars");
    settings.perturb_size = get_double("perturb_size");
    settings.one_hot_inputs = get_bool("one_hot_inputs");
    settings.tileset = &tileset_for(game());
    return settings;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig config;
    config.game = game();
    config.generations = get_int("generations");
    config.levels_per_individual = get_int("levels_per_individual");
    config.level_width = get_int("level_width");
    config.level_height = get_int("level_height");
    config.master_seed = get_u64("seed");
    config.workers = get_int("workers");
    config.validate_genomes = get_bool("validate_genomes");

    config.neat.population_size = get_int("population_size");
    config.neat.c1 = get_double("c1");
    config.neat.c2 = get_double("c2");
    config.neat.c3 = get_double("c3");
    config.neat.compatibility_threshold = get_double("compatibility_threshold");
    config.neat.add_node_prob = get_double("add_node_prob");
    config.neat.add_conn_prob = get_double("add_conn_prob");
    config.neat.weight_mutate_rate = get_double("weight_mutate_rate");
    config.neat.weight_replace_rate = get_double("weight_replace_rate");
    config.neat.weight_perturb_span = get_double("weight_perturb_span");
    config.neat.survival_fraction = get_double("survival_fraction");
    config.neat.elitism = get_int("elitism");
    config.neat.stagnation_limit = get_int("stagnation_limit");

    config.novelty.k_neighbors = get_int("novelty_k");
    config.novelty.lambda = get_int("lambda");
    config.novelty.distance = distance_function_from_name(get("distance_function"));
    config.novelty.intra_k = get_int("intra_k");

    config.weights.novelty = get_double("w_novelty");
    config.weights.solvability = get_double("w_solvability");
    config.weights.intra = get_double("w_intra");

    config.generator = generator_settings();
    return config;
}

DirectGAConfig RunConfig::directga_config() const {
    DirectGAConfig config;
    config.population_size = get_int("dga_population_size");
    config.generations = get_int("dga_generations");
    config.desired_entropy = get_double("dga_desired_entropy");
    config.chunk_edge = get_int("dga_chunk_edge");
    config.use_partial_solvability = get_bool("dga_use_partial_solvability");
    config.use_novelty = get_bool("dga_use_novelty");
    config.entropy_weight = get_double("dga_w_entropy");
    config.partial_solvability_weight = get_double("dga_w_psolv");
    config.novelty_weight = get_double("dga_w_novelty");
    config.mutation_prob = get_double("dga_mutation_prob");
    config.elitism = get_int("dga_elitism");
    config.novelty.k_neighbors = get_int("dga_novelty_k");
    config.novelty.lambda = get_int("dga_lambda");
    config.novelty.distance = DistanceFunctionId::VisualDiversity;
    config.novelty.intra_k = 1;
    return config;
}

std::string RunConfig::serialize() const {
    std::ostringstream out;
    for (const auto& entry : config_schema()) out << entry.key << " = " << get(entry.key) << '\n';
    return out.str();
}

}  // namespace pcgnn
