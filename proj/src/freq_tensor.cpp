#include "freqreg/freq_tensor.hpp"

#include <algorithm>
#include <stdexcept>

#include "freqreg/dct.hpp"

namespace freqreg {

FrequencyTensor::FrequencyTensor(DenseTensor coeffs, std::size_t epsilon,
                                 std::shared_ptr<const ZigzagPlan> plan)
    : coeffs_(std::move(coeffs)), epsilon_(epsilon), plan_(std::move(plan)) {
    // Thresholds above max_threshold all mean "keep everything"; store the
    // canonical value so equal tensors serialize to equal bytes.
    epsilon_ = std::min(epsilon_, plan_->max_threshold());
}

FrequencyTensor FrequencyTensor::from_spatial(const DenseTensor& spatial, std::size_t epsilon) {
    if (epsilon < 1) throw std::invalid_argument("FrequencyTensor: epsilon must be at least 1");
    auto plan = std::make_shared<const ZigzagPlan>(build_plan(spatial.shape));
    FrequencyTensor t(dct_nd(spatial), epsilon, std::move(plan));
    t.truncate_storage();
    return t;
}

FrequencyTensor FrequencyTensor::from_coefficients(DenseTensor coeffs, std::size_t epsilon) {
    if (epsilon < 1) throw std::invalid_argument("FrequencyTensor: epsilon must be at least 1");
    auto plan = std::make_shared<const ZigzagPlan>(build_plan(coeffs.shape));
    FrequencyTensor t(std::move(coeffs), epsilon, std::move(plan));
    t.truncate_storage();
    return t;
}

DenseTensor FrequencyTensor::reconstruct() const { return idct_nd(coeffs_); }

DenseTensor FrequencyTensor::backward(const DenseTensor& grad_spatial) const {
    if (grad_spatial.shape != coeffs_.shape)
        throw std::invalid_argument("FrequencyTensor::backward: shape mismatch");
    // Any index with a component >= epsilon has L1 norm >= epsilon, so those
    // columns are never needed.
    DenseTensor grad = idct_nd_adjoint_limited(grad_spatial, epsilon_);
    const std::size_t total = plan_->total();
    for (std::size_t i = plan_->count_below(epsilon_); i < total; ++i)
        grad[plan_->order[i]] = 0.0;
    return grad;
}

void FrequencyTensor::apply_truncation(std::size_t new_epsilon) {
    if (new_epsilon < 1)
        throw std::invalid_argument("apply_truncation: epsilon must be at least 1");
    if (new_epsilon > epsilon_)
        throw std::invalid_argument("apply_truncation: threshold may only shrink");
    epsilon_ = new_epsilon;
    truncate_storage();
}

std::uint64_t FrequencyTensor::nonzero_count() const {
    std::uint64_t n = 0;
    for (double c : coeffs_.data)
        if (c != 0.0) ++n;
    return n;
}

void FrequencyTensor::truncate_storage() {
    const std::size_t total = plan_->total();
    for (std::size_t i = plan_->count_below(epsilon_); i < total; ++i)
        coeffs_[plan_->order[i]] = 0.0;
}

}  // namespace freqreg
