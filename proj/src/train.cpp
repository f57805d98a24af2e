#include "freqreg/train.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "freqreg/rng.hpp"

namespace freqreg {

void TrainConfig::validate() const {
    if (epochs == 0 || batch_size == 0)
        throw std::invalid_argument("TrainConfig: epochs and batch_size must be positive");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("TrainConfig: learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("TrainConfig: momentum must be in [0, 1)");
    if (!(gamma > 0.0) || gamma >= 1.0)
        throw std::invalid_argument("TrainConfig: gamma must be in (0, 1)");
    if (!(epsilon_ratio > 0.0) || epsilon_ratio > 1.0)
        throw std::invalid_argument("TrainConfig: epsilon_ratio must be in (0, 1]");
    if (min_keep == 0) throw std::invalid_argument("TrainConfig: min_keep must be positive");
}

std::vector<ThresholdAssignment> thresholds_for_model(const TruncationSchedule& schedule,
                                                      Model& model, std::uint64_t min_keep) {
    std::vector<ThresholdAssignment> out;
    for (auto& l : model.layers) {
        for (auto& t : l.layer->trainables()) {
            if (!t.freq) continue;
            const auto r = threshold_for_ratio(
                t.freq->plan(), schedule.beta,
                std::min<std::uint64_t>(min_keep, t.freq->plan().total()));
            const std::size_t eps = std::min(r.epsilon, t.freq->epsilon());
            out.push_back({t.freq, eps, t.freq->plan().count_below(eps)});
        }
    }
    return out;
}

namespace {

// Per-coefficient scaling that turns the adjoint gradient into the forward
// transform of the spatial gradient (1/D on the DC index of each axis, 2/D
// elsewhere).  With it, a full-threshold frequency step reproduces the plain
// spatial SGD step exactly.
std::vector<double> preconditioner(const std::vector<std::size_t>& shape) {
    std::vector<double> scale(shape_numel(shape), 1.0);
    std::size_t inner = 1;
    for (std::size_t a = shape.size(); a-- > 0;) {
        const std::size_t d = shape[a];
        const double lo = 1.0 / static_cast<double>(d);
        const double hi = 2.0 / static_cast<double>(d);
        for (std::size_t f = 0; f < scale.size(); ++f) {
            const std::size_t idx = (f / inner) % d;
            scale[f] *= (idx == 0) ? lo : hi;
        }
        inner *= d;
    }
    return scale;
}

struct OptimizerSlot {
    TrainableTensor t;
    std::vector<double> velocity;
    std::vector<double> scale;      // empty for plain tensors
    std::size_t applied_epsilon = 0;
};

struct BatchLoss {
    double loss_sum;        // summed over samples
    std::size_t correct;
};

// Softmax cross-entropy over logits (batch, classes); grad is d(mean loss)/d(logits).
BatchLoss softmax_xent(const DenseTensor& logits, const std::uint32_t* labels,
                       std::size_t batch_total, DenseTensor* grad) {
    const std::size_t batch = logits.shape[0];
    const std::size_t classes = logits.shape[1];
    BatchLoss r{0.0, 0};
    if (grad) *grad = DenseTensor(logits.shape);
    for (std::size_t b = 0; b < batch; ++b) {
        const double* row = logits.data.data() + b * classes;
        const std::uint32_t label = labels[b];
        if (label >= classes) throw std::invalid_argument("label outside class range");
        double max_v = row[0];
        std::size_t argmax = 0;
        for (std::size_t c = 1; c < classes; ++c)
            if (row[c] > max_v) { max_v = row[c]; argmax = c; }
        double sum = 0.0;
        for (std::size_t c = 0; c < classes; ++c) sum += std::exp(row[c] - max_v);
        const double logsum = std::log(sum) + max_v;
        r.loss_sum += logsum - row[label];
        if (argmax == label) ++r.correct;
        if (grad) {
            double* g = grad->data.data() + b * classes;
            for (std::size_t c = 0; c < classes; ++c)
                g[c] = std::exp(row[c] - logsum) / static_cast<double>(batch_total);
            g[label] -= 1.0 / static_cast<double>(batch_total);
        }
    }
    return r;
}

DenseTensor gather_batch(const LabeledDataset& data, const std::vector<std::uint32_t>& idx,
                         std::size_t begin, std::size_t end,
                         std::vector<std::uint32_t>* labels) {
    const std::size_t sample = data.images.numel() / data.size();
    std::vector<std::size_t> shape = data.images.shape;
    shape[0] = end - begin;
    DenseTensor batch(shape);
    labels->resize(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        const std::size_t src = idx[i];
        std::copy_n(data.images.data.data() + src * sample, sample,
                    batch.data.data() + (i - begin) * sample);
        (*labels)[i - begin] = data.labels[src];
    }
    return batch;
}

void truncate_to(OptimizerSlot& slot, std::size_t new_epsilon) {
    if (!slot.t.freq || new_epsilon >= slot.applied_epsilon) return;
    slot.t.freq->apply_truncation(new_epsilon);
    // Stale momentum on truncated positions would resurrect them.
    const ZigzagPlan& plan = slot.t.freq->plan();
    const std::size_t total = plan.total();
    for (std::size_t i = plan.count_below(new_epsilon); i < total; ++i)
        slot.velocity[plan.order[i]] = 0.0;
    slot.applied_epsilon = new_epsilon;
}

std::uint64_t total_weights(const Model& model) {
    std::uint64_t n = 0;
    for (const auto& l : model.layers) n += l.layer->weight_count();
    return n;
}

std::uint64_t kept_weights(const Model& model) {
    std::uint64_t n = 0;
    for (const auto& l : model.layers) n += l.layer->kept_count();
    return n;
}

}  // namespace

TrainReport train(Model& model, const LabeledDataset& data, const TrainConfig& config) {
    config.validate();
    if (data.size() == 0) throw std::invalid_argument("train: empty dataset");

    std::vector<OptimizerSlot> slots;
    for (auto& l : model.layers) {
        for (auto& t : l.layer->trainables()) {
            OptimizerSlot slot;
            slot.t = t;
            slot.velocity.assign(t.values->size(), 0.0);
            if (t.freq) {
                slot.scale = preconditioner(t.freq->shape());
                slot.applied_epsilon = t.freq->epsilon();
            }
            slots.push_back(std::move(slot));
        }
    }

    TruncationSchedule schedule(config.gamma, config.epsilon_ratio);
    const std::uint64_t total = total_weights(model);
    Rng rng(config.seed);
    std::vector<std::uint32_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);

    TrainReport report;
    std::vector<std::uint32_t> labels;
    DenseTensor grad_logits;

    const auto apply_schedule = [&]() {
        schedule.step();
        for (auto& a : thresholds_for_model(schedule, model, config.min_keep))
            for (auto& slot : slots)
                if (slot.t.freq == a.tensor) truncate_to(slot, a.epsilon);
    };

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(idx);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t begin = 0; begin < data.size(); begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, data.size());
            DenseTensor batch = gather_batch(data, idx, begin, end, &labels);
            DenseTensor logits = model.forward(batch);
            const BatchLoss bl =
                softmax_xent(logits, labels.data(), end - begin, &grad_logits);
            if (!std::isfinite(bl.loss_sum))
                throw NumericError("train: loss diverged (NaN/inf) at epoch " +
                                   std::to_string(epoch));
            loss_sum += bl.loss_sum;
            correct += bl.correct;

            model.backward(grad_logits);
            for (auto& slot : slots) {
                auto& v = slot.velocity;
                auto& values = *slot.t.values;
                const auto& g = *slot.t.grad;
                if (slot.scale.empty()) {
                    for (std::size_t i = 0; i < v.size(); ++i) {
                        v[i] = config.momentum * v[i] + g[i];
                        values[i] -= config.learning_rate * v[i];
                    }
                } else {
                    for (std::size_t i = 0; i < v.size(); ++i) {
                        v[i] = config.momentum * v[i] + slot.scale[i] * g[i];
                        values[i] -= config.learning_rate * v[i];
                    }
                }
            }
            model.invalidate_caches();
            if (config.schedule_point == SchedulePoint::PerStep) apply_schedule();
        }
        if (config.schedule_point == SchedulePoint::PerEpoch) apply_schedule();

        // Accuracy is measured after the epoch's updates so a later eval of
        // the trained model reproduces the last report line.
        (void)correct;
        const std::uint64_t kept = kept_weights(model);
        report.epochs.push_back({epoch, loss_sum / static_cast<double>(data.size()),
                                 evaluate(model, data).accuracy, schedule.beta, kept,
                                 total ? static_cast<double>(kept) / static_cast<double>(total)
                                       : 0.0});
    }
    return report;
}

EvalResult evaluate(Model& model, const LabeledDataset& data) {
    if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
    std::vector<std::uint32_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::uint32_t> labels;
    double loss_sum = 0.0;
    std::size_t correct = 0;
    constexpr std::size_t kEvalBatch = 256;
    for (std::size_t begin = 0; begin < data.size(); begin += kEvalBatch) {
        const std::size_t end = std::min(begin + kEvalBatch, data.size());
        DenseTensor batch = gather_batch(data, idx, begin, end, &labels);
        DenseTensor logits = model.forward(batch);
        const BatchLoss bl = softmax_xent(logits, labels.data(), end - begin, nullptr);
        loss_sum += bl.loss_sum;
        correct += bl.correct;
    }
    return {static_cast<double>(correct) / static_cast<double>(data.size()),
            loss_sum / static_cast<double>(data.size())};
}

ParameterCount count_parameters(const Model& model) {
    const std::uint64_t total = total_weights(model);
    const std::uint64_t kept = kept_weights(model);
    ParameterCount c;
    c.total = total;
    c.kept = kept;
    c.rate = total ? static_cast<double>(kept) / static_cast<double>(total) : 0.0;
    c.times = kept ? static_cast<std::uint64_t>(
                         std::llround(static_cast<double>(total) / static_cast<double>(kept)))
                   : 0;
    return c;
}

std::vector<LayerCount> count_parameters_per_layer(const Model& model) {
    std::vector<LayerCount> rows;
    for (const auto& l : model.layers) {
        if (l.layer->weight_count() == 0) continue;
        rows.push_back({l.name, l.layer->kind(), l.layer->weight_count(), l.layer->kept_count()});
    }
    return rows;
}

std::string format_epoch_line(const EpochStats& s) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "epoch %zu loss %.6f acc %.4f beta %.6f kept %llu rate %.6f",
                  s.epoch, s.loss, s.accuracy, s.beta,
                  static_cast<unsigned long long>(s.kept), s.rate);
    return buf;
}

}  // namespace freqreg
