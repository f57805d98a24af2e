#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "freqreg/tensor.hpp"

namespace freqreg {

// Raised for malformed or inconsistent input files.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LabeledDataset {
    DenseTensor images;               // (count, channels, h, w), values in [0, 1]
    std::vector<std::uint32_t> labels;
    std::size_t num_classes = 0;

    std::size_t size() const { return labels.size(); }
};

// Big-endian IDX pair: images (magic 0x00000803) and labels (magic 0x00000801).
// Pixel bytes are scaled by 1/255.
LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path);

// Same parsing from in-memory buffers; load_idx is a thin file wrapper.
LabeledDataset parse_idx(const std::vector<std::uint8_t>& image_bytes,
                         const std::vector<std::uint8_t>& label_bytes);

// Deterministic Gaussian clusters around per-class centers, tight enough to
// be almost perfectly separable.  Images come out shaped (count, 1, 1, dim).
// Samples cycle through the classes, so any prefix is balanced.
LabeledDataset synthetic_blobs(std::size_t num_classes, std::size_t per_class,
                               std::size_t dim, std::uint64_t seed);

// First `first` samples and the remainder, e.g. a train/test split of one
// synthetic draw.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& ds,
                                                        std::size_t first);

}  // namespace freqreg
