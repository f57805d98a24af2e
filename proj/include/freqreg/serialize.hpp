#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freqreg/freq_tensor.hpp"
#include "freqreg/model.hpp"

namespace freqreg {

enum class CoeffDtype : std::uint8_t { Single = 0, Half = 1 };

// FRT1 packed tensor, little-endian:
//   magic "FRT1" | version u8 | rank u8 | dims u32[rank] | epsilon u32
//   | dtype u8 | count u64 | coefficients (count x 4 or 2 bytes)
// Coefficients appear in canonical zigzag order (ascending L1 norm,
// lexicographic within a shell); count always equals counts[epsilon], so the
// boundary plus the shape fully locates every value.
std::vector<std::uint8_t> pack_tensor(const FrequencyTensor& t, CoeffDtype dtype);
FrequencyTensor unpack_tensor(const std::vector<std::uint8_t>& bytes);

struct TensorHeader {
    std::vector<std::size_t> shape;
    std::size_t epsilon;
    CoeffDtype dtype;
    std::uint64_t count;
};
TensorHeader inspect_tensor(const std::vector<std::uint8_t>& bytes);

// FRM1 model container, little-endian:
//   magic "FRM1" | version u8 | dtype u8 | layer count u32 | layers...
// Each layer: name (u16 length + bytes) | kind u8 | kind-specific fields.
// Weighted layers embed an FRT1 blob (u64 length prefix) and a bias payload
// at the container dtype.  The descriptor alone rebuilds the model.
std::vector<std::uint8_t> pack_model(const Model& model, CoeffDtype dtype);
Model unpack_model(const std::vector<std::uint8_t>& bytes);

// Storage footprint bookkeeping for reports.
struct PackedSizes {
    std::uint64_t file_bytes;
    std::uint64_t coefficient_bytes;  // survivors * dtype width
    std::uint64_t coefficient_count;
};
PackedSizes packed_sizes(const std::vector<std::uint8_t>& model_bytes);

// IEEE 754 binary16 conversions, round-to-nearest-even.
std::uint16_t float_to_half(float value);
float half_to_float(std::uint16_t bits);

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace freqreg
