#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "freqreg/freq_tensor.hpp"
#include "freqreg/tensor.hpp"

namespace freqreg {

enum class ActivationKind { Relu, Identity };

// View over a layer's trainable state, used by the optimizer.  Frequency
// weights expose the coefficient vector; plain weights the spatial one.
struct TrainableTensor {
    FrequencyTensor* freq = nullptr;       // null for plain weights
    std::vector<double>* values = nullptr; // storage being optimized
    std::vector<double>* grad = nullptr;   // matching gradient, valid after backward
};

class Layer {
public:
    virtual ~Layer() = default;

    virtual DenseTensor forward(const DenseTensor& x) = 0;
    // Returns grad wrt input; parameter gradients are stored on the layer.
    virtual DenseTensor backward(const DenseTensor& grad_out) = 0;

    virtual std::vector<TrainableTensor> trainables() { return {}; }
    virtual std::string kind() const = 0;

    // Weight parameter count (biases excluded); zero for stateless layers.
    virtual std::uint64_t weight_count() const { return 0; }
    virtual std::uint64_t kept_count() const { return 0; }
};

class DenseLayer : public Layer {
public:
    // Weight shape (out, in).  `regularized` selects frequency-domain storage;
    // the plain variant keeps spatial weights and is the reference baseline.
    DenseLayer(DenseTensor initial_weight, std::optional<std::vector<double>> bias,
               bool regularized, std::size_t epsilon);

    // Adopt an existing frequency-domain weight (deserialization path).
    DenseLayer(FrequencyTensor weight, std::optional<std::vector<double>> bias);

    DenseTensor forward(const DenseTensor& x) override;
    DenseTensor backward(const DenseTensor& grad_out) override;
    std::vector<TrainableTensor> trainables() override;
    std::string kind() const override { return "Linear"; }
    std::uint64_t weight_count() const override;
    std::uint64_t kept_count() const override;

    std::size_t in_features() const { return in_; }
    std::size_t out_features() const { return out_; }
    bool regularized() const { return regularized_; }
    bool has_bias() const { return bias_.has_value(); }
    const std::vector<double>& bias() const { return *bias_; }
    std::vector<double>& bias() { return *bias_; }
    FrequencyTensor& weight() { return weight_; }
    const FrequencyTensor& weight() const { return weight_; }
    const DenseTensor& plain_weight() const { return plain_weight_; }
    DenseTensor& plain_weight() { return plain_weight_; }

    // Spatial weight for the current parameters (reconstructed and cached).
    const DenseTensor& spatial_weight();
    void invalidate_cache() { cache_valid_ = false; }

private:
    std::size_t in_ = 0, out_ = 0;
    bool regularized_ = true;
    FrequencyTensor weight_;
    DenseTensor plain_weight_;
    std::optional<std::vector<double>> bias_;

    DenseTensor cached_weight_;
    bool cache_valid_ = false;
    DenseTensor cached_input_;
    bool have_input_ = false;

    std::vector<double> weight_grad_;
    std::vector<double> bias_grad_;
};

class Conv2dLayer : public Layer {
public:
    // Weight shape (out_ch, in_ch, kh, kw), regularized over all four axes.
    Conv2dLayer(DenseTensor initial_weight, std::optional<std::vector<double>> bias,
                bool regularized, std::size_t epsilon, std::size_t stride,
                std::size_t padding);

    // Adopt an existing frequency-domain weight (deserialization path).
    Conv2dLayer(FrequencyTensor weight, std::optional<std::vector<double>> bias,
                std::size_t stride, std::size_t padding);

    DenseTensor forward(const DenseTensor& x) override;
    DenseTensor backward(const DenseTensor& grad_out) override;
    std::vector<TrainableTensor> trainables() override;
    std::string kind() const override { return "Conv2d"; }
    std::uint64_t weight_count() const override;
    std::uint64_t kept_count() const override;

    std::size_t stride() const { return stride_; }
    std::size_t padding() const { return padding_; }
    bool regularized() const { return regularized_; }
    bool has_bias() const { return bias_.has_value(); }
    const std::vector<double>& bias() const { return *bias_; }
    std::vector<double>& bias() { return *bias_; }
    FrequencyTensor& weight() { return weight_; }
    const FrequencyTensor& weight() const { return weight_; }
    const DenseTensor& plain_weight() const { return plain_weight_; }
    DenseTensor& plain_weight() { return plain_weight_; }
    const std::vector<std::size_t>& weight_shape() const { return weight_shape_; }

    const DenseTensor& spatial_weight();
    void invalidate_cache() { cache_valid_ = false; }

private:
    std::vector<std::size_t> weight_shape_;
    bool regularized_ = true;
    FrequencyTensor weight_;
    DenseTensor plain_weight_;
    std::optional<std::vector<double>> bias_;
    std::size_t stride_ = 1, padding_ = 0;

    DenseTensor cached_weight_;
    bool cache_valid_ = false;
    DenseTensor cached_input_;
    bool have_input_ = false;

    std::vector<double> weight_grad_;
    std::vector<double> bias_grad_;
};

class ActivationLayer : public Layer {
public:
    explicit ActivationLayer(ActivationKind kind) : kind_(kind) {}

    DenseTensor forward(const DenseTensor& x) override;
    DenseTensor backward(const DenseTensor& grad_out) override;
    std::string kind() const override {
        return kind_ == ActivationKind::Relu ? "ReLU" : "Identity";
    }
    ActivationKind activation() const { return kind_; }

private:
    ActivationKind kind_;
    DenseTensor cached_input_;
};

// Collapses (batch, ...) to (batch, features).
class FlattenLayer : public Layer {
public:
    DenseTensor forward(const DenseTensor& x) override;
    DenseTensor backward(const DenseTensor& grad_out) override;
    std::string kind() const override { return "Flatten"; }

private:
    std::vector<std::size_t> cached_shape_;
};

// 2x2 max pooling with stride 2 on (batch, ch, h, w).
class MaxPool2x2Layer : public Layer {
public:
    DenseTensor forward(const DenseTensor& x) override;
    DenseTensor backward(const DenseTensor& grad_out) override;
    std::string kind() const override { return "MaxPool2x2"; }

private:
    std::vector<std::size_t> cached_in_shape_;
    std::vector<std::size_t> argmax_;
};

}  // namespace freqreg
