#include "freqreg/zigzag.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace freqreg {

ZigzagPlan build_plan(const std::vector<std::size_t>& shape) {
    if (shape.empty()) throw std::invalid_argument("build_plan: empty shape");
    if (shape.size() > kMaxRank) throw std::invalid_argument("build_plan: rank must be at most 4");
    std::size_t total = 1;
    std::size_t max_l1 = 0;
    for (std::size_t d : shape) {
        if (d == 0) throw std::invalid_argument("build_plan: dimensions must be positive");
        total *= d;
        max_l1 += d - 1;
    }
    if (total > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("build_plan: tensor too large");

    ZigzagPlan plan;
    plan.shape = shape;

    // L1 norm per flat index, walked in row-major (= lexicographic) order.
    std::vector<std::uint32_t> l1(total);
    std::vector<std::size_t> idx(shape.size(), 0);
    std::uint32_t norm = 0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        l1[flat] = norm;
        for (std::size_t a = shape.size(); a-- > 0;) {
            if (++idx[a] < shape[a]) {
                ++norm;
                break;
            }
            norm -= static_cast<std::uint32_t>(idx[a] - 1);
            idx[a] = 0;
        }
    }

    // Counting sort by shell keeps the lexicographic order within each shell.
    std::vector<std::uint64_t> shell_sizes(max_l1 + 1, 0);
    for (std::size_t flat = 0; flat < total; ++flat) ++shell_sizes[l1[flat]];

    plan.counts.assign(max_l1 + 2, 0);
    for (std::size_t s = 0; s <= max_l1; ++s) plan.counts[s + 1] = plan.counts[s] + shell_sizes[s];

    std::vector<std::uint64_t> cursor(plan.counts.begin(), plan.counts.end() - 1);
    plan.order.resize(total);
    for (std::size_t flat = 0; flat < total; ++flat)
        plan.order[cursor[l1[flat]]++] = static_cast<std::uint32_t>(flat);

    return plan;
}

DenseTensor mask(const ZigzagPlan& plan, std::size_t epsilon) {
    if (epsilon < 1) throw std::invalid_argument("mask: epsilon must be at least 1");
    DenseTensor m(plan.shape);
    const std::uint64_t kept = plan.count_below(epsilon);
    for (std::uint64_t i = 0; i < kept; ++i) m[plan.order[i]] = 1.0;
    return m;
}

ThresholdResult threshold_for_ratio(const ZigzagPlan& plan, double ratio,
                                    std::uint64_t min_keep) {
    if (!(ratio > 0.0) || ratio > 1.0)
        throw std::invalid_argument("threshold_for_ratio: ratio must be in (0, 1]");
    const std::uint64_t total = plan.total();
    if (min_keep < 1 || min_keep > total)
        throw std::invalid_argument("threshold_for_ratio: min_keep out of range");

    const std::uint64_t target =
        std::max(min_keep, static_cast<std::uint64_t>(std::ceil(ratio * static_cast<double>(total))));

    // counts is increasing, so take the largest epsilon that stays under the
    // target; epsilon = 1 (the DC coefficient) always qualifies.
    std::size_t epsilon = 1;
    for (std::size_t e = plan.max_threshold(); e >= 1; --e) {
        if (plan.counts[e] <= target) {
            epsilon = e;
            break;
        }
    }
    return {epsilon, plan.counts[epsilon]};
}

}  // namespace freqreg
