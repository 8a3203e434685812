#pragma once

#include <span>
#include <vector>

#include "pcgnn/neat.hpp"
#include "pcgnn/rng.hpp"
#include "pcgnn/tilemap.hpp"

namespace pcgnn {

struct GeneratorSettings {
    int context_size = 1;
    int predict_size = 1;  // only 1 is supported
    int num_random_vars = 4;
    double perturb_size = 0.0;
    bool one_hot_inputs = false;
    const Tileset* tileset = nullptr;
};

// ((2c+1)^2 - 1) * e + r, where e = tile count for one-hot inputs, 1 otherwise.
int window_input_width(const GeneratorSettings& settings);

// Window cells as network inputs: scalar mode keeps tile values (and the -1
// padding) as-is, one-hot mode emits one block per cell with padding encoded
// as all zeros. r fresh U(-1,1) noise inputs are appended, then every entry
// gets independent U(-p,p) perturbation.
void encode_window(const PaddedWindow& window, const GeneratorSettings& settings, Rng& rng,
                   std::vector<double>& out);

// Two-tile sets use one output and a 0.5 threshold (strictly above = tile 1);
// larger sets take the argmax, lowest index winning ties.
int decode_output(std::span<const double> outputs, const Tileset& tileset);

struct Generator {
    FeedforwardNetwork network;
    GeneratorSettings settings;

    Generator(FeedforwardNetwork net, GeneratorSettings st);
};

// Starts from a uniformly random grid and sweeps it in raster order, replacing
// every cell with the network's prediction for its padded neighborhood.
// Earlier predictions are visible to later ones.
Level generate_level(const Generator& generator, int width, int height, Rng& rng);

// Output neuron count a game's tileset requires.
int output_count_for(const Tileset& tileset);

}  // namespace pcgnn
