#include "pcgnn/neat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace pcgnn {
namespace {

void insert_node_sorted(Genome& g, NodeGene node) {
    auto it = std::lower_bound(g.nodes.begin(), g.nodes.end(), node.id,
                               [](const NodeGene& n, int id) { return n.id < id; });
    g.nodes.insert(it, node);
}

void insert_connection_sorted(Genome& g, ConnectionGene conn) {
    auto it = std::lower_bound(g.connections.begin(), g.connections.end(), conn.innovation,
                               [](const ConnectionGene& c, int innov) { return c.innovation < innov; });
    g.connections.insert(it, conn);
}

// Does adding from->to close a cycle? Checked over all connections, enabled
// or not, so that re-enabling a gene can never break the invariant.
bool would_create_cycle(const Genome& g, int from, int to) {
    if (from == to) return true;
    std::unordered_map<int, std::vector<int>> adjacency;
    for (const auto& c : g.connections) adjacency[c.from_node].push_back(c.to_node);
    std::vector<int> stack{to};
    std::unordered_set<int> seen{to};
    while (!stack.empty()) {
        int node = stack.back();
        stack.pop_back();
        if (node == from) return true;
        auto it = adjacency.find(node);
        if (it == adjacency.end()) continue;
        for (int next : it->second) {
            if (seen.insert(next).second) stack.push_back(next);
        }
    }
    return false;
}

}  // namespace

const NodeGene* Genome::find_node(int id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const NodeGene& n, int i) { return n.id < i; });
    return (it != nodes.end() && it->id == id) ? &*it : nullptr;
}

const ConnectionGene* Genome::find_innovation(int innovation) const {
    auto it = std::lower_bound(connections.begin(), connections.end(), innovation,
                               [](const ConnectionGene& c, int i) { return c.innovation < i; });
    return (it != connections.end() && it->innovation == innovation) ? &*it : nullptr;
}

bool Genome::has_connection(int from, int to) const {
    for (const auto& c : connections) {
        if (c.from_node == from && c.to_node == to) return true;
    }
    return false;
}

int InnovationRegistry::connection_innovation(int from, int to) {
    auto key = std::make_pair(from, to);
    auto it = connection_events_.find(key);
    if (it != connection_events_.end()) return it->second;
    int innov = next_innovation_++;
    connection_events_.emplace(key, innov);
    return innov;
}

InnovationRegistry::NodeSplit InnovationRegistry::node_split(int split_innovation, int from, int to) {
    auto it = split_events_.find(split_innovation);
    if (it != split_events_.end()) return it->second;
    NodeSplit split;
    split.node_id = next_node_id_++;
    split.incoming_innovation = connection_innovation(from, split.node_id);
    split.outgoing_innovation = connection_innovation(split.node_id, to);
    split_events_.emplace(split_innovation, split);
    return split;
}

void InnovationRegistry::begin_generation() {
    connection_events_.clear();
    split_events_.clear();
}

void InnovationRegistry::reserve_node_ids(int first_free) {
    next_node_id_ = std::max(next_node_id_, first_free);
}

std::vector<Genome> initial_population(const NeatConfig& config, int input_count, int output_count,
                                       InnovationRegistry& registry, Rng& rng) {
    if (input_count < 1 || output_count < 1) {
        throw std::invalid_argument("initial_population needs at least one input and output");
    }
    registry.reserve_node_ids(input_count + output_count);

    std::vector<Genome> population;
    population.reserve(config.population_size);
    for (int g = 0; g < config.population_size; ++g) {
        Genome genome;
        genome.input_count = input_count;
        genome.output_count = output_count;
        for (int i = 0; i < input_count; ++i) genome.nodes.push_back({i, NodeKind::Input});
        for (int o = 0; o < output_count; ++o) {
            genome.nodes.push_back({input_count + o, NodeKind::Output});
        }
        for (int i = 0; i < input_count; ++i) {
            for (int o = 0; o < output_count; ++o) {
                int innov = registry.connection_innovation(i, input_count + o);
                genome.connections.push_back({innov, i, input_count + o, rng.normal(), true});
            }
        }
        std::sort(genome.connections.begin(), genome.connections.end(),
                  [](const ConnectionGene& a, const ConnectionGene& b) {
                      return a.innovation < b.innovation;
                  });
        population.push_back(std::move(genome));
    }
    return population;
}

Genome mutate(const Genome& genome, const NeatConfig& config, InnovationRegistry& registry, Rng& rng) {
    Genome g = genome;
    g.fitness.reset();

    if (rng.chance(config.add_node_prob)) {
        std::vector<int> enabled;
        for (int i = 0; i < static_cast<int>(g.connections.size()); ++i) {
            if (g.connections[i].enabled) enabled.push_back(i);
        }
        if (!enabled.empty()) {
            int pick = enabled[rng.below(enabled.size())];
            ConnectionGene& old = g.connections[pick];
            old.enabled = false;
            auto split = registry.node_split(old.innovation, old.from_node, old.to_node);
            double old_weight = old.weight;
            int from = old.from_node, to = old.to_node;
            insert_node_sorted(g, {split.node_id, NodeKind::Hidden});
            insert_connection_sorted(g, {split.incoming_innovation, from, split.node_id, 1.0, true});
            insert_connection_sorted(g, {split.outgoing_innovation, split.node_id, to, old_weight, true});
        }
    }

    if (rng.chance(config.add_conn_prob)) {
        std::vector<int> sources, targets;
        for (const auto& n : g.nodes) {
            if (n.kind != NodeKind::Output) sources.push_back(n.id);
            if (n.kind != NodeKind::Input) targets.push_back(n.id);
        }
        // Bounded random attempts; a failed draw just skips the mutation.
        for (int attempt = 0; attempt < 20; ++attempt) {
            int from = sources[rng.below(sources.size())];
            int to = targets[rng.below(targets.size())];
            if (from == to || g.has_connection(from, to)) continue;
            if (would_create_cycle(g, from, to)) continue;
            int innov = registry.connection_innovation(from, to);
            insert_connection_sorted(g, {innov, from, to, rng.normal(), true});
            break;
        }
    }

    for (auto& c : g.connections) {
        double r = rng.uniform01();
        if (r < config.weight_replace_rate) {
            c.weight = rng.normal();
        } else if (r < config.weight_replace_rate + config.weight_mutate_rate) {
            c.weight += rng.uniform(-config.weight_perturb_span, config.weight_perturb_span);
        }
    }
    return g;
}

Genome crossover(const Genome& parent_a, const Genome& parent_b, double fitness_a, double fitness_b,
                 Rng& rng) {
    // The fitter parent donates disjoint and excess genes; ties flip a coin.
    const Genome* fitter;
    const Genome* other;
    if (fitness_a > fitness_b) {
        fitter = &parent_a;
        other = &parent_b;
    } else if (fitness_b > fitness_a) {
        fitter = &parent_b;
        other = &parent_a;
    } else if (rng.chance(0.5)) {
        fitter = &parent_a;
        other = &parent_b;
    } else {
        fitter = &parent_b;
        other = &parent_a;
    }

    Genome child;
    child.input_count = fitter->input_count;
    child.output_count = fitter->output_count;
    child.nodes = fitter->nodes;  // topology follows the fitter parent, so the child stays acyclic
    child.connections.reserve(fitter->connections.size());
    for (const auto& gene : fitter->connections) {
        ConnectionGene inherited = gene;
        if (const ConnectionGene* match = other->find_innovation(gene.innovation)) {
            if (rng.chance(0.5)) inherited.weight = match->weight;
            if (!gene.enabled || !match->enabled) {
                inherited.enabled = !rng.chance(0.75);
            } else {
                inherited.enabled = true;
            }
        }
        child.connections.push_back(inherited);
    }
    return child;
}

double compatibility_distance(const Genome& g1, const Genome& g2, const NeatConfig& config) {
    std::size_t i = 0, j = 0;
    int matching = 0, disjoint = 0, excess = 0;
    double weight_diff = 0.0;
    const auto& a = g1.connections;
    const auto& b = g2.connections;
    while (i < a.size() && j < b.size()) {
        if (a[i].innovation == b[j].innovation) {
            weight_diff += std::abs(a[i].weight - b[j].weight);
            ++matching;
            ++i;
            ++j;
        } else if (a[i].innovation < b[j].innovation) {
            ++disjoint;
            ++i;
        } else {
            ++disjoint;
            ++j;
        }
    }
    excess = static_cast<int>((a.size() - i) + (b.size() - j));

    double n = static_cast<double>(std::max({a.size(), b.size(), std::size_t{1}}));
    double mean_weight_diff = matching ? weight_diff / matching : 0.0;
    return config.c1 * excess / n + config.c2 * disjoint / n + config.c3 * mean_weight_diff;
}

void speciate(const std::vector<Genome>& population, std::vector<SpeciesState>& species,
              const NeatConfig& config, int* next_species_id) {
    for (auto& s : species) s.members.clear();
    for (int i = 0; i < static_cast<int>(population.size()); ++i) {
        bool placed = false;
        for (auto& s : species) {
            if (compatibility_distance(population[i], s.representative, config) <
                config.compatibility_threshold) {
                s.members.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            SpeciesState fresh;
            fresh.id = (*next_species_id)++;
            fresh.representative = population[i];
            fresh.members.push_back(i);
            species.push_back(std::move(fresh));
        }
    }
    std::erase_if(species, [](const SpeciesState& s) { return s.members.empty(); });
    for (auto& s : species) s.representative = population[s.members.front()];
}

std::vector<Genome> reproduce(std::vector<SpeciesState>& species, const std::vector<Genome>& population,
                              const std::vector<double>& fitnesses, const NeatConfig& config,
                              InnovationRegistry& registry, Rng& rng,
                              std::vector<std::string>* warnings) {
    if (population.empty() || fitnesses.size() != population.size()) {
        throw std::invalid_argument("reproduce: population and fitnesses must match");
    }
    for (double f : fitnesses) {
        if (!std::isfinite(f)) throw std::invalid_argument("reproduce: fitness must be finite");
    }
    registry.begin_generation();

    int global_best = 0;
    for (int i = 1; i < static_cast<int>(fitnesses.size()); ++i) {
        if (fitnesses[i] > fitnesses[global_best]) global_best = i;
    }

    for (auto& s : species) {
        std::sort(s.members.begin(), s.members.end(), [&](int lhs, int rhs) {
            if (fitnesses[lhs] != fitnesses[rhs]) return fitnesses[lhs] > fitnesses[rhs];
            return lhs < rhs;
        });
        double current_best = fitnesses[s.members.front()];
        if (!s.has_best || current_best > s.best_fitness + 1e-12) {
            s.best_fitness = current_best;
            s.has_best = true;
            s.stagnation = 0;
        } else {
            ++s.stagnation;
        }
    }

    std::vector<SpeciesState*> eligible;
    bool all_stagnant = true;
    for (auto& s : species) {
        bool stagnant = s.stagnation >= config.stagnation_limit;
        bool holds_best = std::find(s.members.begin(), s.members.end(), global_best) != s.members.end();
        if (!stagnant) all_stagnant = false;
        if (!stagnant || holds_best) eligible.push_back(&s);
    }
    if (all_stagnant && warnings) {
        warnings->push_back("all species stagnant; reseeding from the global best");
    }

    // Offspring quota per species proportional to its mean fitness (fitness
    // sharing: sum of member fitness / species size), largest-remainder
    // rounding so the population size is preserved exactly.
    std::vector<double> scores(eligible.size(), 0.0);
    double total = 0.0;
    double min_score = 0.0;
    for (std::size_t s = 0; s < eligible.size(); ++s) {
        double sum = 0.0;
        for (int m : eligible[s]->members) sum += fitnesses[m];
        scores[s] = sum / eligible[s]->members.size();
        min_score = std::min(min_score, scores[s]);
    }
    for (auto& v : scores) {
        v -= min_score;  // shift keeps quotas nonnegative if fitness went negative
        total += v;
    }
    if (total <= 0.0) {
        std::fill(scores.begin(), scores.end(), 1.0);
        total = static_cast<double>(scores.size());
    }

    const int pop_size = config.population_size;
    std::vector<int> quota(eligible.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    int assigned = 0;
    for (std::size_t s = 0; s < eligible.size(); ++s) {
        double share = scores[s] / total * pop_size;
        quota[s] = static_cast<int>(share);
        assigned += quota[s];
        remainders.emplace_back(share - quota[s], s);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& lhs, const auto& rhs) {
        if (lhs.first != rhs.first) return lhs.first > rhs.first;
        return lhs.second < rhs.second;
    });
    for (int extra = 0; extra < pop_size - assigned; ++extra) {
        quota[remainders[extra % remainders.size()].second] += 1;
    }

    // The species holding the global best always reproduces, so the best
    // genome survives verbatim whenever elitism is on.
    for (std::size_t s = 0; s < eligible.size(); ++s) {
        bool holds_best = std::find(eligible[s]->members.begin(), eligible[s]->members.end(),
                                    global_best) != eligible[s]->members.end();
        if (holds_best && quota[s] == 0) {
            std::size_t donor = 0;
            for (std::size_t t = 1; t < eligible.size(); ++t) {
                if (quota[t] > quota[donor]) donor = t;
            }
            if (quota[donor] > 0) {
                --quota[donor];
                ++quota[s];
            }
        }
    }

    std::vector<Genome> next;
    next.reserve(pop_size);
    for (std::size_t s = 0; s < eligible.size(); ++s) {
        const auto& members = eligible[s]->members;  // already sorted by fitness
        int budget = quota[s];
        if (budget == 0) continue;

        int elites = std::min({config.elitism, budget, static_cast<int>(members.size())});
        for (int e = 0; e < elites; ++e) next.push_back(population[members[e]]);

        int pool_size = std::max(1, static_cast<int>(std::ceil(config.survival_fraction *
                                                               static_cast<double>(members.size()))));
        pool_size = std::min(pool_size, static_cast<int>(members.size()));
        for (int o = elites; o < budget; ++o) {
            int pa = members[rng.below(pool_size)];
            int pb = members[rng.below(pool_size)];
            Genome child = crossover(population[pa], population[pb], fitnesses[pa], fitnesses[pb], rng);
            next.push_back(mutate(child, config, registry, rng));
        }
    }
    return next;
}

bool genome_is_acyclic(const Genome& genome) {
    // Kahn over all connections; leftover nodes mean a cycle.
    std::unordered_map<int, int> indegree;
    std::unordered_map<int, std::vector<int>> adjacency;
    for (const auto& n : genome.nodes) indegree[n.id] = 0;
    for (const auto& c : genome.connections) {
        adjacency[c.from_node].push_back(c.to_node);
        ++indegree[c.to_node];
    }
    std::vector<int> ready;
    for (const auto& [id, deg] : indegree) {
        if (deg == 0) ready.push_back(id);
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
        int node = ready.back();
        ready.pop_back();
        ++seen;
        for (int next : adjacency[node]) {
            if (--indegree[next] == 0) ready.push_back(next);
        }
    }
    return seen == genome.nodes.size();
}

std::vector<std::string> validate_genome(const Genome& genome) {
    std::vector<std::string> issues;
    std::set<int> node_ids;
    int inputs = 0, outputs = 0;
    for (const auto& n : genome.nodes) {
        if (!node_ids.insert(n.id).second) issues.push_back("duplicate node id " + std::to_string(n.id));
        if (n.kind == NodeKind::Input) ++inputs;
        if (n.kind == NodeKind::Output) ++outputs;
    }
    if (inputs != genome.input_count) issues.push_back("input node count mismatch");
    if (outputs != genome.output_count) issues.push_back("output node count mismatch");

    std::set<int> innovations;
    std::set<std::pair<int, int>> endpoints;
    for (const auto& c : genome.connections) {
        if (!innovations.insert(c.innovation).second) {
            issues.push_back("duplicate innovation " + std::to_string(c.innovation));
        }
        if (!endpoints.insert({c.from_node, c.to_node}).second) {
            issues.push_back("duplicate connection " + std::to_string(c.from_node) + "->" +
                             std::to_string(c.to_node));
        }
        const NodeGene* from = genome.find_node(c.from_node);
        const NodeGene* to = genome.find_node(c.to_node);
        if (!from || !to) {
            issues.push_back("dangling endpoint on innovation " + std::to_string(c.innovation));
            continue;
        }
        if (to->kind == NodeKind::Input) {
            issues.push_back("connection into input node " + std::to_string(c.to_node));
        }
        if (!std::isfinite(c.weight)) {
            issues.push_back("non-finite weight on innovation " + std::to_string(c.innovation));
        }
    }
    if (!genome_is_acyclic(genome)) issues.push_back("cycle in connection graph");
    return issues;
}

FeedforwardNetwork::FeedforwardNetwork(const Genome& genome) {
    input_count_ = genome.input_count;
    output_count_ = genome.output_count;
    slot_count_ = static_cast<int>(genome.nodes.size());

    // Inputs take the first slots in id order, everything else follows.
    std::unordered_map<int, int> slot_of;
    int next_slot = 0;
    for (const auto& n : genome.nodes) {
        if (n.kind == NodeKind::Input) slot_of[n.id] = next_slot++;
    }
    if (next_slot != input_count_) throw std::invalid_argument("genome input nodes inconsistent");
    for (const auto& n : genome.nodes) {
        if (n.kind != NodeKind::Input) slot_of[n.id] = next_slot++;
    }

    std::unordered_map<int, std::vector<Incoming>> incoming;
    std::unordered_map<int, std::vector<int>> adjacency;
    std::map<int, int> indegree;  // ordered: ready nodes process in ascending id
    for (const auto& n : genome.nodes) {
        if (n.kind != NodeKind::Input) indegree[n.id] = 0;
    }
    for (const auto& c : genome.connections) {
        if (!c.enabled) continue;  // disabled genes carry no signal
        incoming[c.to_node].push_back({slot_of.at(c.from_node), c.weight});
        adjacency[c.from_node].push_back(c.to_node);
        if (genome.find_node(c.to_node)->kind != NodeKind::Input) ++indegree[c.to_node];
    }
    for (const auto& n : genome.nodes) {
        if (n.kind == NodeKind::Input) {
            for (int next : adjacency[n.id]) --indegree[next];
        }
    }

    std::set<int> ready;
    for (const auto& [id, deg] : indegree) {
        if (deg == 0) ready.insert(id);
    }
    while (!ready.empty()) {
        int id = *ready.begin();
        ready.erase(ready.begin());
        indegree.erase(id);
        NodeEval eval;
        eval.slot = slot_of.at(id);
        eval.incoming = incoming[id];
        schedule_.push_back(std::move(eval));
        for (int next : adjacency[id]) {
            auto it = indegree.find(next);
            if (it != indegree.end() && --it->second == 0) ready.insert(next);
        }
    }
    if (!indegree.empty()) throw std::invalid_argument("cycle detected while building network");

    for (const auto& n : genome.nodes) {
        if (n.kind == NodeKind::Output) output_slots_.push_back(slot_of.at(n.id));
    }
}

void FeedforwardNetwork::activate(std::span<const double> inputs, std::span<double> outputs,
                                  std::vector<double>& scratch) const {
    if (static_cast<int>(inputs.size()) != input_count_) {
        throw std::invalid_argument("activate: expected " + std::to_string(input_count_) +
                                    " inputs, got " + std::to_string(inputs.size()));
    }
    if (static_cast<int>(outputs.size()) != output_count_) {
        throw std::invalid_argument("activate: output span size mismatch");
    }
    scratch.assign(slot_count_, 0.0);
    for (int i = 0; i < input_count_; ++i) scratch[i] = inputs[i];  // inputs pass through unactivated
    for (const auto& node : schedule_) {
        double sum = 0.0;
        for (const auto& in : node.incoming) sum += scratch[in.source_slot] * in.weight;
        scratch[node.slot] = steep_sigmoid(sum);
    }
    for (std::size_t o = 0; o < output_slots_.size(); ++o) outputs[o] = scratch[output_slots_[o]];
}

std::vector<double> FeedforwardNetwork::activate(std::span<const double> inputs) const {
    std::vector<double> outputs(output_count_);
    std::vector<double> scratch;
    activate(inputs, outputs, scratch);
    return outputs;
}

FeedforwardNetwork build_network(const Genome& genome) { return FeedforwardNetwork(genome); }

std::string save_genome(const Genome& genome) {
    std::ostringstream out;
    out << "pcgnn-genome v1 inputs=" << genome.input_count << " outputs=" << genome.output_count
        << "\nNODES\n";
    for (const auto& n : genome.nodes) {
        const char* kind = n.kind == NodeKind::Input ? "input"
                           : n.kind == NodeKind::Hidden ? "hidden"
                                                        : "output";
        out << n.id << ' ' << kind << '\n';
    }
    out << "CONNECTIONS\n";
    char buf[64];
    for (const auto& c : genome.connections) {
        std::snprintf(buf, sizeof buf, "%.17g", c.weight);
        out << c.innovation << ' ' << c.from_node << ' ' << c.to_node << ' ' << buf << ' '
            << (c.enabled ? 1 : 0) << '\n';
    }
    return out.str();
}

Genome load_genome(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("genome file: empty");
    Genome genome;
    {
        std::istringstream header(line);
        std::string magic, version, inputs, outputs;
        header >> magic >> version >> inputs >> outputs;
        if (magic != "pcgnn-genome" || version != "v1" || inputs.rfind("inputs=", 0) != 0 ||
            outputs.rfind("outputs=", 0) != 0) {
            throw std::runtime_error("genome file: bad header: " + line);
        }
        genome.input_count = std::stoi(inputs.substr(7));
        genome.output_count = std::stoi(outputs.substr(8));
    }
    if (!std::getline(in, line) || line != "NODES") throw std::runtime_error("genome file: missing NODES");
    while (std::getline(in, line)) {
        if (line == "CONNECTIONS") break;
        std::istringstream row(line);
        int id;
        std::string kind;
        if (!(row >> id >> kind)) throw std::runtime_error("genome file: bad node line: " + line);
        NodeKind k;
        if (kind == "input") {
            k = NodeKind::Input;
        } else if (kind == "hidden") {
            k = NodeKind::Hidden;
        } else if (kind == "output") {
            k = NodeKind::Output;
        } else {
            throw std::runtime_error("genome file: bad node kind: " + kind);
        }
        genome.nodes.push_back({id, k});
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        ConnectionGene c;
        int enabled;
        if (!(row >> c.innovation >> c.from_node >> c.to_node >> c.weight >> enabled)) {
            throw std::runtime_error("genome file: bad connection line: " + line);
        }
        c.enabled = enabled != 0;
        genome.connections.push_back(c);
    }
    auto issues = validate_genome(genome);
    if (!issues.empty()) throw std::runtime_error("genome file: invalid genome: " + issues.front());
    return genome;
}

void save_genome_file(const Genome& genome, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << save_genome(genome);
}

Genome load_genome_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_genome(buf.str());
}

}  // namespace pcgnn
