#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "pcgnn/neat.hpp"
#include "pcgnn/rng.hpp"

using namespace pcgnn;

namespace {

// Naive recursive evaluation with memoization, independent of the network's
// topological schedule.
double recursive_value(const Genome& g, int node_id, const std::vector<double>& inputs,
                       std::map<int, double>& memo) {
    const NodeGene* node = g.find_node(node_id);
    if (node->kind == NodeKind::Input) return inputs[node_id];
    auto it = memo.find(node_id);
    if (it != memo.end()) return it->second;
    double sum = 0.0;
    for (const auto& c : g.connections) {
        if (c.enabled && c.to_node == node_id) {
            sum += c.weight * recursive_value(g, c.from_node, inputs, memo);
        }
    }
    double value = steep_sigmoid(sum);
    memo[node_id] = value;
    return value;
}

std::vector<double> recursive_activate(const Genome& g, const std::vector<double>& inputs) {
    std::map<int, double> memo;
    std::vector<double> outputs;
    for (const auto& n : g.nodes) {
        if (n.kind == NodeKind::Output) outputs.push_back(recursive_value(g, n.id, inputs, memo));
    }
    return outputs;
}

Genome random_genome(InnovationRegistry& registry, Rng& rng, int mutations = 30) {
    NeatConfig config;
    config.population_size = 1;
    config.add_node_prob = 0.3;
    config.add_conn_prob = 0.5;
    auto population = initial_population(config, 4, 2, registry, rng);
    Genome g = population[0];
    for (int m = 0; m < mutations; ++m) g = mutate(g, config, registry, rng);
    return g;
}

}  // namespace

TEST_CASE("initial_population builds fully connected genomes with shared innovations") {
    NeatConfig config;
    config.population_size = 50;
    InnovationRegistry registry;
    Rng rng(1);
    auto population = initial_population(config, 12, 1, registry, rng);
    REQUIRE(population.size() == 50);
    for (const auto& g : population) {
        CHECK(g.nodes.size() == 13);
        CHECK(g.connections.size() == 12);
        CHECK(validate_genome(g).empty());
    }
    // identical structure events share innovation numbers across genomes
    for (std::size_t i = 0; i < population[0].connections.size(); ++i) {
        for (const auto& g : population) {
            CHECK(g.connections[i].innovation == population[0].connections[i].innovation);
            CHECK(g.connections[i].from_node == population[0].connections[i].from_node);
            CHECK(g.connections[i].to_node == population[0].connections[i].to_node);
        }
    }
}

TEST_CASE("initial_population is seed-deterministic") {
    NeatConfig config;
    config.population_size = 5;
    InnovationRegistry ra, rb;
    Rng a(9), b(9);
    auto pa = initial_population(config, 3, 1, ra, a);
    auto pb = initial_population(config, 3, 1, rb, b);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(save_genome(pa[i]) == save_genome(pb[i]));
}

TEST_CASE("add-node mutation splits a connection") {
    NeatConfig config;
    config.population_size = 1;
    config.add_node_prob = 1.0;
    config.add_conn_prob = 0.0;
    config.weight_mutate_rate = 0.0;
    config.weight_replace_rate = 0.0;
    InnovationRegistry registry;
    Rng rng(2);
    Genome g = initial_population(config, 1, 1, registry, rng)[0];
    double old_weight = g.connections[0].weight;

    registry.begin_generation();
    Genome mutated = mutate(g, config, registry, rng);
    REQUIRE(mutated.connections.size() == 3);
    REQUIRE(mutated.nodes.size() == 3);
    int enabled = 0;
    for (const auto& c : mutated.connections) enabled += c.enabled;
    CHECK(enabled == 2);
    CHECK_FALSE(mutated.connections[0].enabled);  // the split gene
    // in-weight 1.0, out-weight keeps the old value
    const ConnectionGene* incoming = nullptr;
    const ConnectionGene* outgoing = nullptr;
    for (const auto& c : mutated.connections) {
        if (!c.enabled) continue;
        if (c.from_node == 0) incoming = &c;
        if (c.to_node == 1) outgoing = &c;
    }
    REQUIRE(incoming);
    REQUIRE(outgoing);
    CHECK(incoming->weight == 1.0);
    CHECK(outgoing->weight == old_weight);
    CHECK(validate_genome(mutated).empty());
}

TEST_CASE("mutation with zero probabilities is the identity") {
    NeatConfig config;
    config.population_size = 1;
    config.add_node_prob = 0.0;
    config.add_conn_prob = 0.0;
    config.weight_mutate_rate = 0.0;
    config.weight_replace_rate = 0.0;
    InnovationRegistry registry;
    Rng rng(3);
    Genome g = initial_population(config, 4, 2, registry, rng)[0];
    Genome m = mutate(g, config, registry, rng);
    CHECK(save_genome(m) == save_genome(g));
}

TEST_CASE("mutated genomes stay acyclic and valid") {
    InnovationRegistry registry;
    Rng rng(4);
    NeatConfig config;
    config.population_size = 1;
    config.add_node_prob = 0.3;
    config.add_conn_prob = 0.5;
    Genome g = initial_population(config, 4, 2, registry, rng)[0];
    for (int m = 0; m < 10000; ++m) {
        if (m % 50 == 0) registry.begin_generation();
        g = mutate(g, config, registry, rng);
        CHECK(genome_is_acyclic(g));
    }
    CHECK(validate_genome(g).empty());
}

TEST_CASE("innovation numbers are shared within one generation") {
    InnovationRegistry registry;
    registry.begin_generation();
    int a = registry.connection_innovation(3, 7);
    int b = registry.connection_innovation(3, 7);
    CHECK(a == b);
    auto split1 = registry.node_split(a, 3, 7);
    auto split2 = registry.node_split(a, 3, 7);
    CHECK(split1.node_id == split2.node_id);
    CHECK(split1.incoming_innovation == split2.incoming_innovation);
    registry.begin_generation();
    CHECK(registry.connection_innovation(3, 7) != a);  // new generation, new number
}

TEST_CASE("crossover of identical parents keeps the connectivity") {
    InnovationRegistry registry;
    Rng rng(5);
    Genome g = random_genome(registry, rng);
    Genome child = crossover(g, g, 1.0, 1.0, rng);
    REQUIRE(child.connections.size() == g.connections.size());
    for (std::size_t i = 0; i < child.connections.size(); ++i) {
        CHECK(child.connections[i].innovation == g.connections[i].innovation);
        CHECK(child.connections[i].from_node == g.connections[i].from_node);
        CHECK(child.connections[i].to_node == g.connections[i].to_node);
        CHECK(child.connections[i].weight == g.connections[i].weight);
    }
}

TEST_CASE("crossover takes disjoint and excess genes from the fitter parent") {
    // parents with innovations {1,2,3} and {1,2,4}; the first is fitter
    auto make = [](std::vector<int> innovations) {
        Genome g;
        g.input_count = 1;
        g.output_count = 1;
        g.nodes = {{0, NodeKind::Input}, {1, NodeKind::Output}, {2, NodeKind::Hidden}};
        for (int innov : innovations) {
            // endpoints chosen so every line stays acyclic: 0->2, 2->1, 0->1
            if (innov == 1) g.connections.push_back({1, 0, 2, 0.5, true});
            if (innov == 2) g.connections.push_back({2, 2, 1, 0.5, true});
            if (innov == 3) g.connections.push_back({3, 0, 1, 0.25, true});
            if (innov == 4) g.connections.push_back({4, 0, 1, -0.25, true});
        }
        return g;
    };
    Genome a = make({1, 2, 3});
    Genome b = make({1, 2, 4});
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        Genome child = crossover(a, b, 2.0, 1.0, rng);
        std::set<int> innovations;
        for (const auto& c : child.connections) innovations.insert(c.innovation);
        CHECK(innovations == std::set<int>{1, 2, 3});
    }
}

TEST_CASE("crossover children stay within the parents' innovation union") {
    InnovationRegistry registry;
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Genome a = random_genome(registry, rng, 15);
        Genome b = random_genome(registry, rng, 15);
        Genome child = crossover(a, b, rng.uniform01(), rng.uniform01(), rng);
        std::set<int> parents;
        for (const auto& c : a.connections) parents.insert(c.innovation);
        for (const auto& c : b.connections) parents.insert(c.innovation);
        for (const auto& c : child.connections) CHECK(parents.count(c.innovation) == 1);
        CHECK(genome_is_acyclic(child));
    }
}

TEST_CASE("compatibility distance is zero on identical genomes and symmetric") {
    InnovationRegistry registry;
    Rng rng(8);
    NeatConfig config;
    for (int trial = 0; trial < 20; ++trial) {
        Genome a = random_genome(registry, rng, 10);
        Genome b = random_genome(registry, rng, 10);
        CHECK(compatibility_distance(a, a, config) == 0.0);
        CHECK(compatibility_distance(a, b, config) == compatibility_distance(b, a, config));
    }
}

TEST_CASE("compatibility distance weights a single differing weight by c3") {
    Genome a;
    a.input_count = 1;
    a.output_count = 1;
    a.nodes = {{0, NodeKind::Input}, {1, NodeKind::Output}};
    a.connections = {{0, 0, 1, 1.0, true}};
    Genome b = a;
    b.connections[0].weight = 1.5;
    NeatConfig config;
    config.c3 = 0.4;
    CHECK(compatibility_distance(a, b, config) == doctest::Approx(0.2));
}

TEST_CASE("speciate: an infinite threshold gives one species, zero gives one per genome") {
    InnovationRegistry registry;
    Rng rng(9);
    NeatConfig config;
    config.population_size = 10;
    auto population = initial_population(config, 3, 1, registry, rng);

    config.compatibility_threshold = 1e18;
    std::vector<SpeciesState> one;
    int next_id = 1;
    speciate(population, one, config, &next_id);
    CHECK(one.size() == 1);
    CHECK(one[0].members.size() == 10);

    config.compatibility_threshold = 0.0;
    std::vector<SpeciesState> many;
    speciate(population, many, config, &next_id);
    CHECK(many.size() == 10);

    // aggregate: every genome lands in exactly one species
    std::set<int> assigned;
    for (const auto& s : many) {
        for (int m : s.members) CHECK(assigned.insert(m).second);
    }
    CHECK(assigned.size() == 10);
}

TEST_CASE("reproduce preserves population size and elites") {
    InnovationRegistry registry;
    Rng rng(10);
    NeatConfig config;
    config.population_size = 12;
    config.elitism = 1;
    auto population = initial_population(config, 3, 1, registry, rng);
    std::vector<double> fitnesses(population.size());
    for (std::size_t i = 0; i < fitnesses.size(); ++i) fitnesses[i] = 0.1 * static_cast<double>(i);

    std::vector<SpeciesState> species;
    int next_id = 1;
    speciate(population, species, config, &next_id);
    std::string best_before = save_genome(population[11]);
    auto next = reproduce(species, population, fitnesses, config, registry, rng);
    CHECK(next.size() == 12);
    bool found = false;
    for (const auto& g : next) {
        if (save_genome(g) == best_before) found = true;
    }
    CHECK(found);
}

TEST_CASE("reproduce gives equal-fitness species quotas within one of each other") {
    // hand-built partition, no crossover noise: count offspring per species
    InnovationRegistry registry;
    Rng rng(12);
    NeatConfig config;
    config.population_size = 10;
    config.elitism = 0;
    config.add_node_prob = 0.0;
    config.add_conn_prob = 0.0;
    config.weight_mutate_rate = 0.0;
    config.weight_replace_rate = 0.0;
    config.survival_fraction = 1.0;

    // three separately-seeded "species" of different sizes, equal fitness
    auto population = initial_population(config, 2, 1, registry, rng);
    std::vector<SpeciesState> species(3);
    species[0].id = 1;
    species[0].members = {0, 1};
    species[1].id = 2;
    species[1].members = {2, 3, 4, 5, 6};
    species[2].id = 3;
    species[2].members = {7, 8, 9};
    for (auto& s : species) s.representative = population[s.members[0]];

    // distinct weights per species member, so offspring are attributable
    for (std::size_t i = 0; i < population.size(); ++i) {
        for (auto& c : population[i].connections) c.weight = static_cast<double>(i);
    }
    std::vector<double> fitnesses(10, 1.0);
    auto next = reproduce(species, population, fitnesses, config, registry, rng);
    REQUIRE(next.size() == 10);
    std::map<int, int> per_species;  // species index by originating weight
    for (const auto& g : next) {
        int origin = static_cast<int>(g.connections[0].weight);
        int sp = origin <= 1 ? 0 : origin <= 6 ? 1 : 2;
        per_species[sp]++;
    }
    int lo = 1000, hi = 0;
    for (const auto& [sp, count] : per_species) {
        lo = std::min(lo, count);
        hi = std::max(hi, count);
    }
    CHECK(hi - lo <= 1);
}

TEST_CASE("build_network computes the steep sigmoid of weighted inputs") {
    Genome g;
    g.input_count = 1;
    g.output_count = 1;
    g.nodes = {{0, NodeKind::Input}, {1, NodeKind::Output}};
    g.connections = {{0, 0, 1, 0.7, true}};
    auto net = build_network(g);
    for (double x : {-2.0, -0.5, 0.0, 0.3, 1.7}) {
        auto out = net.activate(std::vector<double>{x});
        CHECK(out[0] == doctest::Approx(steep_sigmoid(0.7 * x)).epsilon(1e-15));
    }
    // disabled connections carry no signal
    g.connections[0].enabled = false;
    auto silent = build_network(g);
    CHECK(silent.activate(std::vector<double>{5.0})[0] == doctest::Approx(0.5));
}

TEST_CASE("all-zero weights emit 0.5 everywhere") {
    InnovationRegistry registry;
    Rng rng(13);
    NeatConfig config;
    config.population_size = 1;
    Genome g = initial_population(config, 4, 2, registry, rng)[0];
    for (auto& c : g.connections) c.weight = 0.0;
    auto net = build_network(g);
    auto out = net.activate(std::vector<double>{1.0, -1.0, 0.5, 2.0});
    for (double v : out) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("hand-built 2-2-1 network matches manual arithmetic") {
    Genome g;
    g.input_count = 2;
    g.output_count = 1;
    g.nodes = {{0, NodeKind::Input},
               {1, NodeKind::Input},
               {2, NodeKind::Output},
               {3, NodeKind::Hidden},
               {4, NodeKind::Hidden}};
    g.connections = {
        {0, 0, 3, 0.5, true},  {1, 1, 3, -0.7, true}, {2, 0, 4, 1.2, true},
        {3, 1, 4, 0.3, true},  {4, 3, 2, 0.9, true},  {5, 4, 2, -1.1, true},
    };
    auto net = build_network(g);
    double x0 = 0.25, x1 = -0.5;
    double h3 = steep_sigmoid(0.5 * x0 - 0.7 * x1);
    double h4 = steep_sigmoid(1.2 * x0 + 0.3 * x1);
    double expected = steep_sigmoid(0.9 * h3 - 1.1 * h4);
    auto out = net.activate(std::vector<double>{x0, x1});
    CHECK(std::abs(out[0] - expected) < 1e-12);
}

TEST_CASE("network evaluation matches naive recursion on random genomes") {
    InnovationRegistry registry;
    Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        Genome g = random_genome(registry, rng, 25);
        auto net = build_network(g);
        std::vector<double> inputs;
        for (int i = 0; i < g.input_count; ++i) inputs.push_back(rng.uniform(-2, 2));
        auto fast = net.activate(inputs);
        auto slow = recursive_activate(g, inputs);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t o = 0; o < fast.size(); ++o) {
            CHECK(fast[o] == doctest::Approx(slow[o]).epsilon(1e-12));
        }
    }
}

TEST_CASE("activate validates the input length") {
    Genome g;
    g.input_count = 2;
    g.output_count = 1;
    g.nodes = {{0, NodeKind::Input}, {1, NodeKind::Input}, {2, NodeKind::Output}};
    g.connections = {{0, 0, 2, 1.0, true}};
    auto net = build_network(g);
    CHECK_THROWS_AS(net.activate(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("genome files round-trip bit-exactly") {
    InnovationRegistry registry;
    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        Genome g = random_genome(registry, rng, 20);
        std::string text = save_genome(g);
        Genome back = load_genome(text);
        CHECK(save_genome(back) == text);
    }
}

TEST_CASE("validate_genome flags corrupted genomes") {
    Genome g;
    g.input_count = 1;
    g.output_count = 1;
    g.nodes = {{0, NodeKind::Input}, {1, NodeKind::Output}};
    g.connections = {{0, 0, 1, 0.5, true}};
    CHECK(validate_genome(g).empty());

    Genome dup = g;
    dup.connections.push_back({0, 1, 0, 0.5, true});
    CHECK_FALSE(validate_genome(dup).empty());

    Genome into_input = g;
    into_input.connections.push_back({1, 1, 0, 0.5, true});
    CHECK_FALSE(validate_genome(into_input).empty());

    Genome dangling = g;
    dangling.connections.push_back({2, 5, 1, 0.5, true});
    CHECK_FALSE(validate_genome(dangling).empty());
}
