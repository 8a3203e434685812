#include "pcgnn/generator.hpp"

#include <stdexcept>
#include <string>

namespace pcgnn {

int window_input_width(const GeneratorSettings& settings) {
    if (!settings.tileset) throw std::invalid_argument("generator settings need a tileset");
    if (settings.context_size < 1) throw std::invalid_argument("context_size must be >= 1");
    if (settings.num_random_vars < 0) throw std::invalid_argument("num_random_vars must be >= 0");
    if (settings.predict_size != 1) throw std::invalid_argument("only predict_size = 1 is supported");
    const int side = 2 * settings.context_size + 1;
    const int cells = side * side - 1;
    const int per_cell = settings.one_hot_inputs ? settings.tileset->size() : 1;
    return cells * per_cell + settings.num_random_vars;
}

void encode_window(const PaddedWindow& window, const GeneratorSettings& settings, Rng& rng,
                   std::vector<double>& out) {
    out.clear();
    if (settings.one_hot_inputs) {
        const int n = settings.tileset->size();
        for (int v : window.values) {
            for (int t = 0; t < n; ++t) out.push_back(v == t ? 1.0 : 0.0);  // padding -> all zeros
        }
    } else {
        for (int v : window.values) out.push_back(static_cast<double>(v));
    }
    for (int r = 0; r < settings.num_random_vars; ++r) out.push_back(rng.uniform(-1.0, 1.0));
    if (settings.perturb_size > 0.0) {
        for (auto& v : out) v += rng.uniform(-settings.perturb_size, settings.perturb_size);
    }
}

int decode_output(std::span<const double> outputs, const Tileset& tileset) {
    const int n = tileset.size();
    if (n == 2) {
        if (outputs.size() != 1) {
            throw std::invalid_argument("decode_output: two-tile sets use a single output, got " +
                                        std::to_string(outputs.size()));
        }
        return outputs[0] > 0.5 ? 1 : 0;
    }
    if (static_cast<int>(outputs.size()) != n) {
        throw std::invalid_argument("decode_output: expected " + std::to_string(n) +
                                    " outputs, got " + std::to_string(outputs.size()));
    }
    int best = 0;
    for (int t = 1; t < n; ++t) {
        if (outputs[t] > outputs[best]) best = t;
    }
    return best;
}

int output_count_for(const Tileset& tileset) { return tileset.size() == 2 ? 1 : tileset.size(); }

Generator::Generator(FeedforwardNetwork net, GeneratorSettings st)
    : network(std::move(net)), settings(st) {
    const int expected = window_input_width(settings);
    if (network.input_count() != expected) {
        throw std::invalid_argument("generator: network expects " +
                                    std::to_string(network.input_count()) +
                                    " inputs but the settings produce " + std::to_string(expected));
    }
    const int out_expected = output_count_for(*settings.tileset);
    if (network.output_count() != out_expected) {
        throw std::invalid_argument("generator: network has " +
                                    std::to_string(network.output_count()) + " outputs, tileset needs " +
                                    std::to_string(out_expected));
    }
}

Level generate_level(const Generator& generator, int width, int height, Rng& rng) {
    const GeneratorSettings& settings = generator.settings;
    Level level = random_level(width, height, *settings.tileset, rng);

    std::vector<double> inputs, scratch;
    std::vector<double> outputs(generator.network.output_count());
    PaddedWindow padded;
    padded.context = settings.context_size;

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            padded_window_into(level, x, y, settings.context_size, padded.values);
            encode_window(padded, settings, rng, inputs);
            generator.network.activate(inputs, outputs, scratch);
            level.set(x, y, static_cast<std::uint8_t>(decode_output(outputs, *settings.tileset)));
        }
    }
    return level;
}

}  // namespace pcgnn
