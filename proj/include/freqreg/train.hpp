#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "freqreg/data.hpp"
#include "freqreg/model.hpp"
#include "freqreg/schedule.hpp"

namespace freqreg {

// Raised when training or a numeric check diverges.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SchedulePoint { PerStep, PerEpoch };

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 128;
    double learning_rate = 0.01;
    double momentum = 0.9;
    double gamma = 0.01;
    double epsilon_ratio = 0.01;
    std::uint64_t min_keep = 1;
    std::uint64_t seed = 0;
    // The decay recurrence is applied after every optimizer step by default;
    // PerEpoch applies it once per epoch instead.
    SchedulePoint schedule_point = SchedulePoint::PerStep;

    void validate() const;
};

struct EpochStats {
    std::size_t epoch;      // 1-based
    double loss;            // mean training loss
    double accuracy;        // training accuracy
    double beta;            // schedule ratio after this epoch's updates
    std::uint64_t kept;     // non-zero weight coefficients
    double rate;            // kept / total weights
};

struct TrainReport {
    std::vector<EpochStats> epochs;
};

struct EvalResult {
    double accuracy;
    double mean_loss;
};

struct ParameterCount {
    std::uint64_t total;    // weight parameters, biases excluded
    std::uint64_t kept;     // non-zero coefficients
    double rate;            // kept / total
    std::uint64_t times;    // reduction factor, total / kept rounded
};

struct LayerCount {
    std::string name;
    std::string kind;
    std::uint64_t total;
    std::uint64_t kept;
};

struct ThresholdAssignment {
    FrequencyTensor* tensor;
    std::size_t epsilon;
    std::uint64_t kept;
};

// Integer thresholds for every regularized tensor at the schedule's current
// ratio; assignments never exceed a tensor's current threshold.
std::vector<ThresholdAssignment> thresholds_for_model(const TruncationSchedule& schedule,
                                                      Model& model, std::uint64_t min_keep);

// Mini-batch SGD with momentum, softmax cross-entropy, and the truncation
// schedule wired in.  Deterministic for a fixed config and seed.
TrainReport train(Model& model, const LabeledDataset& data, const TrainConfig& config);

EvalResult evaluate(Model& model, const LabeledDataset& data);

ParameterCount count_parameters(const Model& model);
std::vector<LayerCount> count_parameters_per_layer(const Model& model);

// Fixed-order, single-space report line, one per epoch.
std::string format_epoch_line(const EpochStats& s);

}  // namespace freqreg
