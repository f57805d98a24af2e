#include "freqreg/layers.hpp"

#include <algorithm>
#include <stdexcept>

namespace freqreg {

namespace {

void check_rank(const DenseTensor& x, std::size_t rank, const char* what) {
    if (x.rank() != rank) throw std::invalid_argument(std::string(what) + ": unexpected input rank");
}

}  // namespace

// ---------------------------------------------------------------------------
// DenseLayer

DenseLayer::DenseLayer(DenseTensor initial_weight, std::optional<std::vector<double>> bias,
                       bool regularized, std::size_t epsilon)
    : regularized_(regularized), bias_(std::move(bias)) {
    if (initial_weight.rank() != 2)
        throw std::invalid_argument("DenseLayer: weight must have shape (out, in)");
    out_ = initial_weight.shape[0];
    in_ = initial_weight.shape[1];
    if (bias_ && bias_->size() != out_)
        throw std::invalid_argument("DenseLayer: bias length must equal out features");
    if (regularized_)
        weight_ = FrequencyTensor::from_spatial(initial_weight, epsilon);
    else
        plain_weight_ = std::move(initial_weight);
}

DenseLayer::DenseLayer(FrequencyTensor weight, std::optional<std::vector<double>> bias)
    : regularized_(true), weight_(std::move(weight)), bias_(std::move(bias)) {
    if (weight_.shape().size() != 2)
        throw std::invalid_argument("DenseLayer: weight must have shape (out, in)");
    out_ = weight_.shape()[0];
    in_ = weight_.shape()[1];
    if (bias_ && bias_->size() != out_)
        throw std::invalid_argument("DenseLayer: bias length must equal out features");
}

const DenseTensor& DenseLayer::spatial_weight() {
    if (!cache_valid_) {
        cached_weight_ = regularized_ ? weight_.reconstruct() : plain_weight_;
        cache_valid_ = true;
    }
    return cached_weight_;
}

DenseTensor DenseLayer::forward(const DenseTensor& x) {
    check_rank(x, 2, "DenseLayer::forward");
    if (x.shape[1] != in_)
        throw std::invalid_argument("DenseLayer::forward: input width mismatch");
    const DenseTensor& w = spatial_weight();
    const std::size_t batch = x.shape[0];
    DenseTensor z({batch, out_});
    for (std::size_t b = 0; b < batch; ++b) {
        const double* xr = x.data.data() + b * in_;
        double* zr = z.data.data() + b * out_;
        for (std::size_t o = 0; o < out_; ++o) {
            const double* wr = w.data.data() + o * in_;
            double acc = bias_ ? (*bias_)[o] : 0.0;
            for (std::size_t i = 0; i < in_; ++i) acc += xr[i] * wr[i];
            zr[o] = acc;
        }
    }
    cached_input_ = x;
    have_input_ = true;
    return z;
}

DenseTensor DenseLayer::backward(const DenseTensor& grad_out) {
    if (!have_input_) throw std::logic_error("DenseLayer::backward called before forward");
    check_rank(grad_out, 2, "DenseLayer::backward");
    const std::size_t batch = cached_input_.shape[0];
    if (grad_out.shape[0] != batch || grad_out.shape[1] != out_)
        throw std::invalid_argument("DenseLayer::backward: gradient shape mismatch");

    const DenseTensor& w = spatial_weight();
    DenseTensor grad_x({batch, in_});
    DenseTensor grad_w({out_, in_});
    bias_grad_.assign(out_, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
        const double* xr = cached_input_.data.data() + b * in_;
        const double* gr = grad_out.data.data() + b * out_;
        double* gx = grad_x.data.data() + b * in_;
        for (std::size_t o = 0; o < out_; ++o) {
            const double g = gr[o];
            if (g == 0.0) continue;
            const double* wr = w.data.data() + o * in_;
            double* gw = grad_w.data.data() + o * in_;
            for (std::size_t i = 0; i < in_; ++i) {
                gx[i] += g * wr[i];
                gw[i] += g * xr[i];
            }
            bias_grad_[o] += g;
        }
    }
    weight_grad_ = regularized_ ? weight_.backward(grad_w).data : std::move(grad_w.data);
    return grad_x;
}

std::vector<TrainableTensor> DenseLayer::trainables() {
    std::vector<TrainableTensor> out;
    if (regularized_)
        out.push_back({&weight_, &weight_.coefficients().data, &weight_grad_});
    else
        out.push_back({nullptr, &plain_weight_.data, &weight_grad_});
    if (bias_) out.push_back({nullptr, &*bias_, &bias_grad_});
    return out;
}

std::uint64_t DenseLayer::weight_count() const { return static_cast<std::uint64_t>(out_) * in_; }

std::uint64_t DenseLayer::kept_count() const {
    return regularized_ ? weight_.nonzero_count() : weight_count();
}

// ---------------------------------------------------------------------------
// Conv2dLayer

Conv2dLayer::Conv2dLayer(DenseTensor initial_weight, std::optional<std::vector<double>> bias,
                         bool regularized, std::size_t epsilon, std::size_t stride,
                         std::size_t padding)
    : regularized_(regularized), bias_(std::move(bias)), stride_(stride), padding_(padding) {
    if (initial_weight.rank() != 4)
        throw std::invalid_argument("Conv2dLayer: weight must have shape (out_ch, in_ch, kh, kw)");
    if (stride_ == 0) throw std::invalid_argument("Conv2dLayer: stride must be positive");
    weight_shape_ = initial_weight.shape;
    if (bias_ && bias_->size() != weight_shape_[0])
        throw std::invalid_argument("Conv2dLayer: bias length must equal out channels");
    if (regularized_)
        weight_ = FrequencyTensor::from_spatial(initial_weight, epsilon);
    else
        plain_weight_ = std::move(initial_weight);
}

Conv2dLayer::Conv2dLayer(FrequencyTensor weight, std::optional<std::vector<double>> bias,
                         std::size_t stride, std::size_t padding)
    : regularized_(true), weight_(std::move(weight)), bias_(std::move(bias)),
      stride_(stride), padding_(padding) {
    if (weight_.shape().size() != 4)
        throw std::invalid_argument("Conv2dLayer: weight must have shape (out_ch, in_ch, kh, kw)");
    if (stride_ == 0) throw std::invalid_argument("Conv2dLayer: stride must be positive");
    weight_shape_ = weight_.shape();
    if (bias_ && bias_->size() != weight_shape_[0])
        throw std::invalid_argument("Conv2dLayer: bias length must equal out channels");
}

const DenseTensor& Conv2dLayer::spatial_weight() {
    if (!cache_valid_) {
        cached_weight_ = regularized_ ? weight_.reconstruct() : plain_weight_;
        cache_valid_ = true;
    }
    return cached_weight_;
}

DenseTensor Conv2dLayer::forward(const DenseTensor& x) {
    check_rank(x, 4, "Conv2dLayer::forward");
    const std::size_t out_ch = weight_shape_[0], in_ch = weight_shape_[1];
    const std::size_t kh = weight_shape_[2], kw = weight_shape_[3];
    if (x.shape[1] != in_ch)
        throw std::invalid_argument("Conv2dLayer::forward: channel mismatch");
    const std::size_t batch = x.shape[0], h = x.shape[2], w = x.shape[3];
    if (h + 2 * padding_ < kh || w + 2 * padding_ < kw)
        throw std::invalid_argument("Conv2dLayer::forward: kernel larger than padded input");
    if ((h + 2 * padding_ - kh) % stride_ != 0 || (w + 2 * padding_ - kw) % stride_ != 0)
        throw std::invalid_argument("Conv2dLayer::forward: non-integer output size");
    const std::size_t oh = (h + 2 * padding_ - kh) / stride_ + 1;
    const std::size_t ow = (w + 2 * padding_ - kw) / stride_ + 1;

    const DenseTensor& wt = spatial_weight();
    DenseTensor z({batch, out_ch, oh, ow});
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t oc = 0; oc < out_ch; ++oc) {
            const double bias_v = bias_ ? (*bias_)[oc] : 0.0;
            for (std::size_t oy = 0; oy < oh; ++oy) {
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    double acc = bias_v;
                    for (std::size_t ic = 0; ic < in_ch; ++ic) {
                        for (std::size_t ky = 0; ky < kh; ++ky) {
                            const std::ptrdiff_t iy =
                                static_cast<std::ptrdiff_t>(oy * stride_ + ky) -
                                static_cast<std::ptrdiff_t>(padding_);
                            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t kx = 0; kx < kw; ++kx) {
                                const std::ptrdiff_t ix =
                                    static_cast<std::ptrdiff_t>(ox * stride_ + kx) -
                                    static_cast<std::ptrdiff_t>(padding_);
                                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
                                acc += x.at({b, ic, static_cast<std::size_t>(iy),
                                             static_cast<std::size_t>(ix)}) *
                                       wt.at({oc, ic, ky, kx});
                            }
                        }
                    }
                    z.at({b, oc, oy, ox}) = acc;
                }
            }
        }
    }
    cached_input_ = x;
    have_input_ = true;
    return z;
}

DenseTensor Conv2dLayer::backward(const DenseTensor& grad_out) {
    if (!have_input_) throw std::logic_error("Conv2dLayer::backward called before forward");
    check_rank(grad_out, 4, "Conv2dLayer::backward");
    const std::size_t out_ch = weight_shape_[0], in_ch = weight_shape_[1];
    const std::size_t kh = weight_shape_[2], kw = weight_shape_[3];
    const std::size_t batch = cached_input_.shape[0];
    const std::size_t h = cached_input_.shape[2], w = cached_input_.shape[3];
    const std::size_t oh = grad_out.shape[2], ow = grad_out.shape[3];
    if (grad_out.shape[0] != batch || grad_out.shape[1] != out_ch)
        throw std::invalid_argument("Conv2dLayer::backward: gradient shape mismatch");

    const DenseTensor& wt = spatial_weight();
    DenseTensor grad_x(cached_input_.shape);
    DenseTensor grad_w(weight_shape_);
    bias_grad_.assign(out_ch, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t oc = 0; oc < out_ch; ++oc) {
            for (std::size_t oy = 0; oy < oh; ++oy) {
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    const double g = grad_out.at({b, oc, oy, ox});
                    bias_grad_[oc] += g;
                    if (g == 0.0) continue;
                    for (std::size_t ic = 0; ic < in_ch; ++ic) {
                        for (std::size_t ky = 0; ky < kh; ++ky) {
                            const std::ptrdiff_t iy =
                                static_cast<std::ptrdiff_t>(oy * stride_ + ky) -
                                static_cast<std::ptrdiff_t>(padding_);
                            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t kx = 0; kx < kw; ++kx) {
                                const std::ptrdiff_t ix =
                                    static_cast<std::ptrdiff_t>(ox * stride_ + kx) -
                                    static_cast<std::ptrdiff_t>(padding_);
                                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
                                const std::size_t uy = static_cast<std::size_t>(iy);
                                const std::size_t ux = static_cast<std::size_t>(ix);
                                grad_w.at({oc, ic, ky, kx}) +=
                                    g * cached_input_.at({b, ic, uy, ux});
                                grad_x.at({b, ic, uy, ux}) += g * wt.at({oc, ic, ky, kx});
                            }
                        }
                    }
                }
            }
        }
    }
    weight_grad_ = regularized_ ? weight_.backward(grad_w).data : std::move(grad_w.data);
    return grad_x;
}

std::vector<TrainableTensor> Conv2dLayer::trainables() {
    std::vector<TrainableTensor> out;
    if (regularized_)
        out.push_back({&weight_, &weight_.coefficients().data, &weight_grad_});
    else
        out.push_back({nullptr, &plain_weight_.data, &weight_grad_});
    if (bias_) out.push_back({nullptr, &*bias_, &bias_grad_});
    return out;
}

std::uint64_t Conv2dLayer::weight_count() const { return shape_numel(weight_shape_); }

std::uint64_t Conv2dLayer::kept_count() const {
    return regularized_ ? weight_.nonzero_count() : weight_count();
}

// ---------------------------------------------------------------------------
// ActivationLayer

DenseTensor ActivationLayer::forward(const DenseTensor& x) {
    cached_input_ = x;
    if (kind_ == ActivationKind::Identity) return x;
    DenseTensor out = x;
    for (double& v : out.data) v = std::max(v, 0.0);
    return out;
}

DenseTensor ActivationLayer::backward(const DenseTensor& grad_out) {
    if (kind_ == ActivationKind::Identity) return grad_out;
    DenseTensor grad = grad_out;
    for (std::size_t i = 0; i < grad.numel(); ++i)
        if (cached_input_[i] <= 0.0) grad[i] = 0.0;
    return grad;
}

// ---------------------------------------------------------------------------
// FlattenLayer

DenseTensor FlattenLayer::forward(const DenseTensor& x) {
    cached_shape_ = x.shape;
    const std::size_t batch = x.shape[0];
    return DenseTensor({batch, x.numel() / batch}, x.data);
}

DenseTensor FlattenLayer::backward(const DenseTensor& grad_out) {
    return DenseTensor(cached_shape_, grad_out.data);
}

// ---------------------------------------------------------------------------
// MaxPool2x2Layer

DenseTensor MaxPool2x2Layer::forward(const DenseTensor& x) {
    check_rank(x, 4, "MaxPool2x2Layer::forward");
    cached_in_shape_ = x.shape;
    const std::size_t batch = x.shape[0], ch = x.shape[1];
    const std::size_t h = x.shape[2], w = x.shape[3];
    const std::size_t oh = h / 2, ow = w / 2;
    if (oh == 0 || ow == 0)
        throw std::invalid_argument("MaxPool2x2Layer::forward: input smaller than window");
    DenseTensor out({batch, ch, oh, ow});
    argmax_.resize(out.numel());
    std::size_t n = 0;
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t c = 0; c < ch; ++c) {
            for (std::size_t oy = 0; oy < oh; ++oy) {
                for (std::size_t ox = 0; ox < ow; ++ox, ++n) {
                    std::size_t best = x.flat_index({b, c, 2 * oy, 2 * ox});
                    double best_v = x[best];
                    for (std::size_t dy = 0; dy < 2; ++dy) {
                        for (std::size_t dx = 0; dx < 2; ++dx) {
                            const std::size_t idx =
                                x.flat_index({b, c, 2 * oy + dy, 2 * ox + dx});
                            if (x[idx] > best_v) {
                                best_v = x[idx];
                                best = idx;
                            }
                        }
                    }
                    out[n] = best_v;
                    argmax_[n] = best;
                }
            }
        }
    }
    return out;
}

DenseTensor MaxPool2x2Layer::backward(const DenseTensor& grad_out) {
    DenseTensor grad(cached_in_shape_);
    for (std::size_t n = 0; n < grad_out.numel(); ++n) grad[argmax_[n]] += grad_out[n];
    return grad;
}

}  // namespace freqreg
