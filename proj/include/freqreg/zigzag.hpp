#pragma once

#include <cstdint>
#include <vector>

#include "freqreg/tensor.hpp"

namespace freqreg {

// Canonical enumeration of the index vectors of a tensor shape, ordered by
// ascending L1 norm and lexicographically within each L1 shell.  Row-major
// flat index order is lexicographic order, so `order` holds flat indices.
struct ZigzagPlan {
    std::vector<std::size_t> shape;
    std::vector<std::uint32_t> order;   // all flat indices in canonical order
    std::vector<std::uint64_t> counts;  // counts[e] = #{x : |x|_1 < e}, e in [0, max_threshold]

    std::size_t total() const { return order.size(); }

    // Largest meaningful threshold: sum(D_i - 1) + 1 keeps everything.
    std::size_t max_threshold() const { return counts.size() - 1; }

    // Number of index vectors with |x|_1 < epsilon; constant at total() above
    // max_threshold().
    std::uint64_t count_below(std::size_t epsilon) const {
        if (epsilon >= counts.size()) return counts.back();
        return counts[epsilon];
    }
};

ZigzagPlan build_plan(const std::vector<std::size_t>& shape);

// Binary tensor: 1 where |x|_1 < epsilon, else 0.
DenseTensor mask(const ZigzagPlan& plan, std::size_t epsilon);

struct ThresholdResult {
    std::size_t epsilon;
    std::uint64_t kept;
};

// Maps a non-zero ratio to an integer threshold.  target = max(min_keep,
// ceil(ratio * total)); returns the largest epsilon whose kept count stays at
// or under the target, so the realized ratio never overstates.
ThresholdResult threshold_for_ratio(const ZigzagPlan& plan, double ratio,
                                    std::uint64_t min_keep);

}  // namespace freqreg
