#include "freqreg/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "freqreg/freq_tensor.hpp"
#include "freqreg/rng.hpp"

namespace freqreg {

namespace {

// L(W) = sum a.W + 0.5 sum b.W^2, so dL/dW = a + b.W.
struct QuadraticLoss {
    DenseTensor a, b;

    double value(const DenseTensor& w) const {
        double s = 0.0;
        for (std::size_t i = 0; i < w.numel(); ++i)
            s += a[i] * w[i] + 0.5 * b[i] * w[i] * w[i];
        return s;
    }

    DenseTensor grad(const DenseTensor& w) const {
        DenseTensor g(w.shape);
        for (std::size_t i = 0; i < w.numel(); ++i) g[i] = a[i] + b[i] * w[i];
        return g;
    }
};

}  // namespace

GradCheckResult gradcheck_frequency_tensor(const std::vector<std::size_t>& shape,
                                           std::size_t epsilon, std::uint64_t seed,
                                           double tolerance) {
    Rng rng(seed);
    DenseTensor spatial(shape);
    for (double& v : spatial.data) v = rng.uniform(-1.0, 1.0);
    FrequencyTensor t = FrequencyTensor::from_spatial(spatial, epsilon);

    QuadraticLoss loss{DenseTensor(shape), DenseTensor(shape)};
    for (double& v : loss.a.data) v = rng.uniform(-1.0, 1.0);
    for (double& v : loss.b.data) v = rng.uniform(-1.0, 1.0);

    const DenseTensor analytic = t.backward(loss.grad(t.reconstruct()));

    const double h = 1e-5;
    double max_rel = 0.0;
    const ZigzagPlan& plan = t.plan();
    const std::uint64_t survivors = t.nonzero_budget();
    for (std::uint64_t i = 0; i < survivors; ++i) {
        const std::size_t p = plan.order[i];
        const double saved = t.coefficients()[p];
        t.coefficients()[p] = saved + h;
        const double up = loss.value(t.reconstruct());
        t.coefficients()[p] = saved - h;
        const double down = loss.value(t.reconstruct());
        t.coefficients()[p] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(analytic[p]), 1e-6});
        max_rel = std::max(max_rel, std::abs(fd - analytic[p]) / denom);
    }
    return {max_rel, max_rel < tolerance};
}

}  // namespace freqreg
