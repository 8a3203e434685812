#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcgnn/rng.hpp"

namespace pcgnn {

enum class NodeKind { Input, Hidden, Output };

struct NodeGene {
    int id;
    NodeKind kind;
};

struct ConnectionGene {
    int innovation;
    int from_node;
    int to_node;
    double weight;
    bool enabled;
};

// Feedforward NEAT genome. Nodes are kept sorted by id and connections by
// innovation number; the connection graph (enabled or not) stays acyclic.
struct Genome {
    int input_count = 0;
    int output_count = 0;
    std::vector<NodeGene> nodes;
    std::vector<ConnectionGene> connections;
    std::optional<double> fitness;

    const NodeGene* find_node(int id) const;
    const ConnectionGene* find_innovation(int innovation) const;
    bool has_connection(int from, int to) const;
    std::size_t size() const { return nodes.size() + connections.size(); }
};

// Hands out innovation numbers and node ids. Structural events repeated
// within one generation receive the same numbers, which keeps homologous
// genes aligned across the population.
class InnovationRegistry {
public:
    int connection_innovation(int from, int to);

    struct NodeSplit {
        int node_id;
        int incoming_innovation;
        int outgoing_innovation;
    };
    NodeSplit node_split(int split_innovation, int from, int to);

    void begin_generation();
    void reserve_node_ids(int first_free);

private:
    int next_innovation_ = 0;
    int next_node_id_ = 0;
    std::map<std::pair<int, int>, int> connection_events_;
    std::map<int, NodeSplit> split_events_;
};

struct NeatConfig {
    int population_size = 50;
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 0.4;
    double compatibility_threshold = 3.0;
    double add_node_prob = 0.03;
    double add_conn_prob = 0.1;
    double weight_mutate_rate = 0.8;
    double weight_replace_rate = 0.1;
    double weight_perturb_span = 0.5;
    double survival_fraction = 0.2;
    int elitism = 2;
    int stagnation_limit = 15;
};

inline double steep_sigmoid(double z) { return 1.0 / (1.0 + std::exp(-4.9 * z)); }

// population_size genomes, each fully connected input->output, weights N(0,1),
// no hidden nodes. All genomes share innovation numbers via the registry.
std::vector<Genome> initial_population(const NeatConfig& config, int input_count, int output_count,
                                       InnovationRegistry& registry, Rng& rng);

Genome mutate(const Genome& genome, const NeatConfig& config, InnovationRegistry& registry, Rng& rng);

Genome crossover(const Genome& parent_a, const Genome& parent_b, double fitness_a, double fitness_b,
                 Rng& rng);

// c1*E/N + c2*D/N + c3*mean(|dw|) with N = max(connection counts, 1).
double compatibility_distance(const Genome& g1, const Genome& g2, const NeatConfig& config);

struct SpeciesState {
    int id = 0;
    Genome representative;
    std::vector<int> members;  // indices into the current population
    double best_fitness = 0.0;
    bool has_best = false;
    int stagnation = 0;
};

// Assigns every genome to the first species whose representative is within
// the compatibility threshold, founding new species as needed. Emptied
// species are dropped; surviving ones get a fresh representative.
void speciate(const std::vector<Genome>& population, std::vector<SpeciesState>& species,
              const NeatConfig& config, int* next_species_id);

std::vector<Genome> reproduce(std::vector<SpeciesState>& species, const std::vector<Genome>& population,
                              const std::vector<double>& fitnesses, const NeatConfig& config,
                              InnovationRegistry& registry, Rng& rng,
                              std::vector<std::string>* warnings = nullptr);

// Structural checks: unique ids/innovations, valid endpoints, nothing feeding
// an input node, acyclic. Returns human-readable problems, empty when clean.
std::vector<std::string> validate_genome(const Genome& genome);
bool genome_is_acyclic(const Genome& genome);

class FeedforwardNetwork {
public:
    explicit FeedforwardNetwork(const Genome& genome);

    int input_count() const { return input_count_; }
    int output_count() const { return output_count_; }

    void activate(std::span<const double> inputs, std::span<double> outputs,
                  std::vector<double>& scratch) const;
    std::vector<double> activate(std::span<const double> inputs) const;

private:
    struct Incoming {
        int source_slot;
        double weight;
    };
    struct NodeEval {
        int slot;
        std::vector<Incoming> incoming;
    };

    int input_count_ = 0;
    int output_count_ = 0;
    int slot_count_ = 0;
    std::vector<NodeEval> schedule_;
    std::vector<int> output_slots_;
};

FeedforwardNetwork build_network(const Genome& genome);

// Text format, round-trips bit-exactly:
//   pcgnn-genome v1 inputs=<k> outputs=<m>
//   NODES          (id kind)
//   CONNECTIONS    (innovation from to weight enabled)
std::string save_genome(const Genome& genome);
Genome load_genome(std::string_view text);
void save_genome_file(const Genome& genome, const std::string& path);
Genome load_genome_file(const std::string& path);

}  // namespace pcgnn
