#pragma once

#include <memory>
#include <string>
#include <vector>

#include "freqreg/layers.hpp"

namespace freqreg {

struct NamedLayer {
    std::string name;
    std::unique_ptr<Layer> layer;
};

// Ordered stack of named layers.  Layer names are unique within a model.
struct Model {
    std::vector<NamedLayer> layers;
    std::uint64_t rng_seed = 0;

    void add(std::string name, std::unique_ptr<Layer> layer);

    DenseTensor forward(const DenseTensor& x);
    // Propagates back through the stack; parameter gradients end up on layers.
    DenseTensor backward(const DenseTensor& grad_out);

    void invalidate_caches();
};

// Registry of reference configurations.
//   mlp300:       flatten -> 784x300 -> relu -> 300x100 -> relu -> 100x10
//   lenet5-lite:  conv(1->20,5) -> relu -> pool -> conv(20->50,5) -> relu
//                 -> pool -> flatten -> 800x500 -> relu -> 500x10
// `regularized` false builds the plain-weight baseline; initial spatial
// weights are identical for the same seed either way.
Model build_model(const std::string& spec_name, std::uint64_t seed, bool regularized = true);

}  // namespace freqreg
