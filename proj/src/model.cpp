#include "freqreg/model.hpp"

#include <cmath>
#include <stdexcept>

#include "freqreg/rng.hpp"

namespace freqreg {

void Model::add(std::string name, std::unique_ptr<Layer> layer) {
    for (const auto& l : layers)
        if (l.name == name) throw std::invalid_argument("Model: duplicate layer name " + name);
    layers.push_back({std::move(name), std::move(layer)});
}

DenseTensor Model::forward(const DenseTensor& x) {
    DenseTensor cur = x;
    for (auto& l : layers) cur = l.layer->forward(cur);
    return cur;
}

DenseTensor Model::backward(const DenseTensor& grad_out) {
    DenseTensor cur = grad_out;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
        cur = (*it).layer->backward(cur);
    return cur;
}

void Model::invalidate_caches() {
    for (auto& l : layers) {
        if (auto* d = dynamic_cast<DenseLayer*>(l.layer.get())) d->invalidate_cache();
        if (auto* c = dynamic_cast<Conv2dLayer*>(l.layer.get())) c->invalidate_cache();
    }
}

namespace {

DenseTensor init_weight(Rng& rng, const std::vector<std::size_t>& shape, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    DenseTensor w(shape);
    for (double& v : w.data) v = rng.uniform(-bound, bound);
    return w;
}

std::unique_ptr<DenseLayer> make_dense(Rng& rng, std::size_t in, std::size_t out,
                                       bool regularized) {
    DenseTensor w = init_weight(rng, {out, in}, in);
    const std::size_t full = build_plan(w.shape).max_threshold();
    return std::make_unique<DenseLayer>(std::move(w), std::vector<double>(out, 0.0),
                                        regularized, full);
}

std::unique_ptr<Conv2dLayer> make_conv(Rng& rng, std::size_t in_ch, std::size_t out_ch,
                                       std::size_t k, bool regularized) {
    DenseTensor w = init_weight(rng, {out_ch, in_ch, k, k}, in_ch * k * k);
    const std::size_t full = build_plan(w.shape).max_threshold();
    return std::make_unique<Conv2dLayer>(std::move(w), std::vector<double>(out_ch, 0.0),
                                         regularized, full, 1, 0);
}

}  // namespace

Model build_model(const std::string& spec_name, std::uint64_t seed, bool regularized) {
    Rng rng(seed);
    Model m;
    m.rng_seed = seed;
    if (spec_name == "mlp300") {
        m.add("flatten", std::make_unique<FlattenLayer>());
        m.add("fc1", make_dense(rng, 784, 300, regularized));
        m.add("relu1", std::make_unique<ActivationLayer>(ActivationKind::Relu));
        m.add("fc2", make_dense(rng, 300, 100, regularized));
        m.add("relu2", std::make_unique<ActivationLayer>(ActivationKind::Relu));
        m.add("fc3", make_dense(rng, 100, 10, regularized));
    } else if (spec_name == "lenet5-lite") {
        m.add("conv1", make_conv(rng, 1, 20, 5, regularized));
        m.add("relu1", std::make_unique<ActivationLayer>(ActivationKind::Relu));
        m.add("pool1", std::make_unique<MaxPool2x2Layer>());
        m.add("conv2", make_conv(rng, 20, 50, 5, regularized));
        m.add("relu2", std::make_unique<ActivationLayer>(ActivationKind::Relu));
        m.add("pool2", std::make_unique<MaxPool2x2Layer>());
        m.add("flatten", std::make_unique<FlattenLayer>());
        m.add("fc1", make_dense(rng, 800, 500, regularized));
        m.add("relu3", std::make_unique<ActivationLayer>(ActivationKind::Relu));
        m.add("fc2", make_dense(rng, 500, 10, regularized));
    } else {
        throw std::invalid_argument("build_model: unknown model spec " + spec_name);
    }
    return m;
}

}  // namespace freqreg
