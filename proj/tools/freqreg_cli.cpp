#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freqreg/data.hpp"
#include "freqreg/gradcheck.hpp"
#include "freqreg/model.hpp"
#include "freqreg/serialize.hpp"
#include "freqreg/train.hpp"

namespace fs = std::filesystem;
using namespace freqreg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct DataFlags {
    std::string data_dir;
    bool synthetic = false;
    std::size_t synthetic_samples = 2000;
    std::size_t synthetic_test = 1000;
    std::size_t synthetic_classes = 10;
    std::size_t synthetic_dim = 784;
    std::uint64_t synthetic_seed = 1;
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
    cmd->add_option("--data-dir", flags.data_dir,
                    "Directory with MNIST IDX files (falls back to $FREQREG_DATA_DIR)");
    cmd->add_flag("--synthetic", flags.synthetic, "Use the deterministic synthetic dataset");
    cmd->add_option("--synthetic-samples", flags.synthetic_samples,
                    "Synthetic training sample count");
    cmd->add_option("--synthetic-test", flags.synthetic_test, "Synthetic test sample count");
    cmd->add_option("--synthetic-classes", flags.synthetic_classes, "Synthetic class count");
    cmd->add_option("--synthetic-dim", flags.synthetic_dim, "Synthetic feature dimension");
    cmd->add_option("--synthetic-seed", flags.synthetic_seed, "Synthetic data seed");
}

std::string resolve_data_dir(const DataFlags& flags) {
    if (!flags.data_dir.empty()) return flags.data_dir;
    if (const char* env = std::getenv("FREQREG_DATA_DIR")) return env;
    return {};
}

// Train and test halves; for IDX data the conventional file names are used.
std::pair<LabeledDataset, LabeledDataset> load_data(const DataFlags& flags) {
    if (flags.synthetic) {
        const std::size_t per_class =
            (flags.synthetic_samples + flags.synthetic_test + flags.synthetic_classes - 1) /
            flags.synthetic_classes;
        LabeledDataset all = synthetic_blobs(flags.synthetic_classes, per_class,
                                             flags.synthetic_dim, flags.synthetic_seed);
        return split_dataset(all, flags.synthetic_samples);
    }
    const std::string dir = resolve_data_dir(flags);
    if (dir.empty())
        throw CLI::ValidationError("data", "either --synthetic or --data-dir is required");
    const auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
    LabeledDataset train =
        load_idx(path("train-images-idx3-ubyte"), path("train-labels-idx1-ubyte"));
    LabeledDataset test;
    if (fs::exists(path("t10k-images-idx3-ubyte")))
        test = load_idx(path("t10k-images-idx3-ubyte"), path("t10k-labels-idx1-ubyte"));
    else
        test = train;
    return {std::move(train), std::move(test)};
}

CoeffDtype parse_dtype(const std::string& s) {
    if (s == "single") return CoeffDtype::Single;
    if (s == "half") return CoeffDtype::Half;
    throw CLI::ValidationError("--dtype", "must be 'single' or 'half'");
}

void print_report_table(const Model& model, const char* title) {
    std::printf("%s\n", title);
    std::printf("%-12s %14s %14s %s\n", "Layer Type", "Original NoP.", "Remaining NoP.",
                "Compress Rate");
    for (const auto& row : count_parameters_per_layer(model)) {
        const double pct = 100.0 * static_cast<double>(row.kept) / static_cast<double>(row.total);
        const std::uint64_t times = row.kept
            ? static_cast<std::uint64_t>(std::llround(static_cast<double>(row.total) /
                                                      static_cast<double>(row.kept)))
            : 0;
        std::printf("%-12s %14llu %14llu %.4f%%(%llu\xC3\x97)\n", row.kind.c_str(),
                    static_cast<unsigned long long>(row.total),
                    static_cast<unsigned long long>(row.kept), pct,
                    static_cast<unsigned long long>(times));
    }
    const ParameterCount c = count_parameters(model);
    std::printf("%-12s %14llu %14llu %.4f%%(%llu\xC3\x97)\n", "total",
                static_cast<unsigned long long>(c.total),
                static_cast<unsigned long long>(c.kept), 100.0 * c.rate,
                static_cast<unsigned long long>(c.times));
}

int cmd_train(const std::string& model_name, const DataFlags& data_flags,
              const TrainConfig& config, bool plain, const std::string& out_path,
              CoeffDtype dtype) {
    config.validate();
    auto [train_data, test_data] = load_data(data_flags);
    Model model = build_model(model_name, config.seed, !plain);
    TrainReport report;
    try {
        report = train(model, train_data, config);
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("training data does not fit the model: ") + e.what());
    }
    for (const auto& s : report.epochs) std::printf("%s\n", format_epoch_line(s).c_str());
    const EvalResult test = evaluate(model, test_data);
    std::printf("test_accuracy %.4f test_loss %.6f\n", test.accuracy, test.mean_loss);
    if (!out_path.empty()) write_binary_file(out_path, pack_model(model, dtype));
    return kExitOk;
}

int cmd_eval(const std::string& model_path, const DataFlags& data_flags) {
    Model model = unpack_model(read_binary_file(model_path));
    auto [train_data, test_data] = load_data(data_flags);
    EvalResult r;
    try {
        r = evaluate(model, test_data);
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("evaluation data does not fit the model: ") + e.what());
    }
    std::printf("accuracy %.4f\n", r.accuracy);
    std::printf("loss %.6f\n", r.mean_loss);
    return kExitOk;
}

int cmd_report(const std::string& model_path) {
    const std::vector<std::uint8_t> bytes = read_binary_file(model_path);
    const Model model = unpack_model(bytes);
    print_report_table(model, model_path.c_str());
    const PackedSizes sizes = packed_sizes(bytes);
    std::printf("coefficients %llu payload_bytes %llu file_bytes %llu\n",
                static_cast<unsigned long long>(sizes.coefficient_count),
                static_cast<unsigned long long>(sizes.coefficient_bytes),
                static_cast<unsigned long long>(sizes.file_bytes));
    return kExitOk;
}

bool has_magic(const std::vector<std::uint8_t>& bytes, const char* magic) {
    return bytes.size() >= 4 && bytes[0] == magic[0] && bytes[1] == magic[1] &&
           bytes[2] == magic[2] && bytes[3] == magic[3];
}

int cmd_pack(const std::string& in_path, const std::string& out_path,
             const std::optional<std::string>& dtype_flag) {
    const std::vector<std::uint8_t> bytes = read_binary_file(in_path);
    std::vector<std::uint8_t> out;
    if (has_magic(bytes, "FRT1")) {
        const CoeffDtype dtype =
            dtype_flag ? parse_dtype(*dtype_flag) : inspect_tensor(bytes).dtype;
        out = pack_tensor(unpack_tensor(bytes), dtype);
    } else if (has_magic(bytes, "FRM1")) {
        const Model model = unpack_model(bytes);
        const CoeffDtype dtype = dtype_flag ? parse_dtype(*dtype_flag)
                                            : static_cast<CoeffDtype>(bytes[5]);
        out = pack_model(model, dtype);
    } else {
        throw DataError(in_path + ": not an FRT1 or FRM1 file");
    }
    write_binary_file(out_path, out);
    return kExitOk;
}

void inspect_file(const std::vector<std::uint8_t>& bytes) {
    if (has_magic(bytes, "FRT1")) {
        const TensorHeader h = inspect_tensor(bytes);
        std::string shape;
        for (std::size_t d : h.shape) shape += (shape.empty() ? "" : "x") + std::to_string(d);
        std::printf("tensor shape %s epsilon %zu dtype %s count %llu\n", shape.c_str(), h.epsilon,
                    h.dtype == CoeffDtype::Single ? "single" : "half",
                    static_cast<unsigned long long>(h.count));
        return;
    }
    if (has_magic(bytes, "FRM1")) {
        const Model model = unpack_model(bytes);
        std::printf("model dtype %s layers %zu\n",
                    static_cast<CoeffDtype>(bytes.at(5)) == CoeffDtype::Single ? "single" : "half",
                    model.layers.size());
        for (const auto& l : model.layers) {
            const FrequencyTensor* w = nullptr;
            if (const auto* d = dynamic_cast<const DenseLayer*>(l.layer.get())) w = &d->weight();
            if (const auto* c = dynamic_cast<const Conv2dLayer*>(l.layer.get())) w = &c->weight();
            if (w) {
                std::string shape;
                for (std::size_t d : w->shape())
                    shape += (shape.empty() ? "" : "x") + std::to_string(d);
                std::printf("layer %s %s shape %s epsilon %zu count %llu\n", l.name.c_str(),
                            l.layer->kind().c_str(), shape.c_str(), w->epsilon(),
                            static_cast<unsigned long long>(w->nonzero_budget()));
            } else {
                std::printf("layer %s %s\n", l.name.c_str(), l.layer->kind().c_str());
            }
        }
        return;
    }
    throw DataError("not an FRT1 or FRM1 file");
}

int cmd_unpack(const std::string& in_path, bool inspect, const std::string& out_path) {
    const std::vector<std::uint8_t> bytes = read_binary_file(in_path);
    if (inspect || out_path.empty()) inspect_file(bytes);
    if (!out_path.empty()) {
        std::vector<std::uint8_t> out;
        if (has_magic(bytes, "FRT1")) {
            out = pack_tensor(unpack_tensor(bytes), inspect_tensor(bytes).dtype);
        } else if (has_magic(bytes, "FRM1")) {
            const Model model = unpack_model(bytes);
            out = pack_model(model, static_cast<CoeffDtype>(bytes[5]));
        } else {
            throw DataError(in_path + ": not an FRT1 or FRM1 file");
        }
        write_binary_file(out_path, out);
    }
    return kExitOk;
}

int cmd_gradcheck(const std::vector<std::size_t>& shape, std::size_t epsilon,
                  std::uint64_t seed) {
    const GradCheckResult r = gradcheck_frequency_tensor(shape, epsilon, seed);
    std::printf("gradcheck max_rel_error %.3e %s\n", r.max_rel_error, r.pass ? "pass" : "fail");
    return r.pass ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-domain parameter compression for small networks"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a model with frequency regularization");
    std::string model_name;
    train_cmd->add_option("--model", model_name, "Model spec: mlp300 or lenet5-lite")->required();
    DataFlags train_data_flags;
    add_data_flags(train_cmd, train_data_flags);
    TrainConfig config;
    train_cmd->add_option("--epochs", config.epochs, "Training epochs");
    train_cmd->add_option("--batch-size", config.batch_size, "Mini-batch size");
    train_cmd->add_option("--lr", config.learning_rate, "Learning rate");
    train_cmd->add_option("--momentum", config.momentum, "SGD momentum");
    train_cmd->add_option("--gamma", config.gamma, "Truncation schedule decay rate");
    train_cmd->add_option("--epsilon-ratio", config.epsilon_ratio,
                          "Floor ratio of non-zero coefficients");
    train_cmd->add_option("--min-keep", config.min_keep, "Minimum coefficients kept per tensor");
    train_cmd->add_option("--seed", config.seed, "RNG seed");
    std::string schedule_point = "step";
    train_cmd->add_option("--schedule", schedule_point,
                          "Apply the decay per optimizer 'step' or per 'epoch'")
        ->check(CLI::IsMember({"step", "epoch"}));
    bool plain = false;
    train_cmd->add_flag("--plain", plain, "Train the plain-weight baseline instead");
    std::string out_path;
    train_cmd->add_option("--out", out_path, "Write the packed model here");
    std::string dtype_str = "single";
    train_cmd->add_option("--dtype", dtype_str, "Packed coefficient dtype: single or half")
        ->check(CLI::IsMember({"single", "half"}));

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a packed model");
    std::string eval_model_path;
    eval_cmd->add_option("model", eval_model_path, "Packed FRM1 model file")->required();
    DataFlags eval_data_flags;
    add_data_flags(eval_cmd, eval_data_flags);

    // report
    auto* report_cmd = app.add_subcommand("report", "Per-layer compression table");
    std::string report_model_path;
    report_cmd->add_option("model", report_model_path, "Packed FRM1 model file")->required();

    // pack
    auto* pack_cmd = app.add_subcommand("pack", "Re-encode a packed file");
    std::string pack_in, pack_out;
    std::optional<std::string> pack_dtype;
    pack_cmd->add_option("--in", pack_in, "Input FRT1/FRM1 file")->required();
    pack_cmd->add_option("--out", pack_out, "Output file")->required();
    pack_cmd->add_option("--dtype", pack_dtype, "Convert coefficients: single or half")
        ->check(CLI::IsMember({"single", "half"}));

    // unpack
    auto* unpack_cmd = app.add_subcommand("unpack", "Inspect or re-encode a packed file");
    std::string unpack_in, unpack_out;
    bool unpack_inspect = false;
    unpack_cmd->add_option("--in", unpack_in, "Input FRT1/FRM1 file")->required();
    unpack_cmd->add_flag("--inspect", unpack_inspect, "Print header fields");
    unpack_cmd->add_option("--out", unpack_out, "Re-encoded output file");

    // gradcheck
    auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient check");
    std::string shape_str;
    std::size_t grad_epsilon = 0;
    std::uint64_t grad_seed = 0;
    grad_cmd->add_option("--shape", shape_str, "Comma-separated dims, e.g. 6,6")->required();
    grad_cmd->add_option("--epsilon", grad_epsilon, "Truncation threshold")->required();
    grad_cmd->add_option("--seed", grad_seed, "RNG seed");

    try {
        app.parse(argc, argv);

        if (*train_cmd) {
            config.schedule_point = schedule_point == "epoch" ? SchedulePoint::PerEpoch
                                                              : SchedulePoint::PerStep;
            return cmd_train(model_name, train_data_flags, config, plain, out_path,
                             parse_dtype(dtype_str));
        }
        if (*eval_cmd) return cmd_eval(eval_model_path, eval_data_flags);
        if (*report_cmd) return cmd_report(report_model_path);
        if (*pack_cmd) return cmd_pack(pack_in, pack_out, pack_dtype);
        if (*unpack_cmd) return cmd_unpack(unpack_in, unpack_inspect, unpack_out);
        if (*grad_cmd) {
            std::vector<std::size_t> shape;
            std::size_t pos = 0;
            while (pos < shape_str.size()) {
                std::size_t next = shape_str.find(',', pos);
                if (next == std::string::npos) next = shape_str.size();
                shape.push_back(std::stoul(shape_str.substr(pos, next - pos)));
                pos = next + 1;
            }
            if (shape.empty() || shape.size() > 4)
                throw CLI::ValidationError("--shape", "rank must be 1..4");
            for (std::size_t d : shape)
                if (d == 0) throw CLI::ValidationError("--shape", "dims must be positive");
            if (grad_epsilon < 1)
                throw CLI::ValidationError("--epsilon", "must be at least 1");
            return cmd_gradcheck(shape, grad_epsilon, grad_seed);
        }
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
}
