#pragma once

#include <memory>
#include <vector>

#include "freqreg/tensor.hpp"
#include "freqreg/zigzag.hpp"

namespace freqreg {

// A parameter tensor held in the frequency domain.  Coefficients with
// |x|_1 >= epsilon are stored as exact zeros, so reconstruction needs no mask
// and serialization only needs the boundary plus the survivors.
class FrequencyTensor {
public:
    FrequencyTensor() = default;

    // Forward-transform a spatial tensor and truncate at epsilon.
    static FrequencyTensor from_spatial(const DenseTensor& spatial, std::size_t epsilon);

    // Adopt frequency-domain coefficients directly; positions at or above the
    // threshold are zeroed to restore the invariant.
    static FrequencyTensor from_coefficients(DenseTensor coeffs, std::size_t epsilon);

    // Spatial tensor W = idct_nd(coeffs).
    DenseTensor reconstruct() const;

    // Frequency-domain gradient: adjoint of the reconstruction map applied to
    // the spatial cotangent, with truncated positions exactly zero.
    DenseTensor backward(const DenseTensor& grad_spatial) const;

    // Shrink the threshold, zeroing every coefficient with |x|_1 >= new_epsilon.
    // Growing the threshold is not supported.
    void apply_truncation(std::size_t new_epsilon);

    const std::vector<std::size_t>& shape() const { return coeffs_.shape; }
    const DenseTensor& coefficients() const { return coeffs_; }
    DenseTensor& coefficients() { return coeffs_; }
    std::size_t epsilon() const { return epsilon_; }
    const ZigzagPlan& plan() const { return *plan_; }
    std::shared_ptr<const ZigzagPlan> plan_ptr() const { return plan_; }

    // Upper bound on surviving coefficients at the current threshold.
    std::uint64_t nonzero_budget() const { return plan_->count_below(epsilon_); }

    // Coefficients that are actually non-zero.
    std::uint64_t nonzero_count() const;

private:
    FrequencyTensor(DenseTensor coeffs, std::size_t epsilon,
                    std::shared_ptr<const ZigzagPlan> plan);

    void truncate_storage();

    DenseTensor coeffs_;
    std::size_t epsilon_ = 0;
    std::shared_ptr<const ZigzagPlan> plan_;
};

}  // namespace freqreg
