#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pcgnn/directga.hpp"
#include "pcgnn/fitness.hpp"

namespace pcgnn {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigEntry {
    const char* key;
    const char* default_value;
    const char* doc;
};

// Every tunable of the training loop, generator, and baseline, with defaults.
const std::vector<ConfigEntry>& config_schema();

// Flat key=value configuration: defaults -> preset -> file -> explicit sets.
// Unknown keys are rejected wherever they come from.
class RunConfig {
public:
    static RunConfig defaults();

    void apply_preset(const std::string& name);
    void apply_file(const std::string& path);
    void apply_text(const std::string& text, const std::string& origin);
    void set(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;

    GameId game() const;
    GeneratorSettings generator_settings() const;
    TrainConfig train_config() const;
    DirectGAConfig directga_config() const;

    // Schema order, one key=value per line; feeding this back through
    // apply_text reproduces the run.
    std::string serialize() const;

private:
    std::map<std::string, std::string> values_;
};

// Presets: "paper" and "desk" (budget-reduced) read the game key to pick the
// per-game block; "directga-plus" and "directga-novelty" configure the
// baseline.
std::vector<std::string> preset_names();

}  // namespace pcgnn
