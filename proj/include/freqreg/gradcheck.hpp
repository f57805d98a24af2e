#pragma once

#include <cstdint>
#include <vector>

#include "freqreg/tensor.hpp"

namespace freqreg {

struct GradCheckResult {
    double max_rel_error;
    bool pass;
};

// Central finite differences against FrequencyTensor::backward for a random
// tensor of the given shape, using a fixed quadratic loss of the
// reconstruction.  Checks every surviving coefficient.
GradCheckResult gradcheck_frequency_tensor(const std::vector<std::size_t>& shape,
                                           std::size_t epsilon, std::uint64_t seed,
                                           double tolerance = 1e-4);

}  // namespace freqreg
