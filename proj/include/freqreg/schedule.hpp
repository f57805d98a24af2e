#pragma once

#include <cstdint>

namespace freqreg {

// Geometric decay of the non-zero ratio beta toward the floor epsilon_ratio:
//   beta_n = beta_{n-1} - gamma * (beta_{n-1} - epsilon_ratio)
// Closed form: beta_n = epsilon_ratio + (1 - gamma)^n * (beta_0 - epsilon_ratio).
struct TruncationSchedule {
    double beta = 1.0;
    double gamma = 0.01;
    double epsilon_ratio = 0.01;
    std::uint64_t epoch = 0;

    TruncationSchedule() = default;
    TruncationSchedule(double gamma_, double epsilon_ratio_);

    void step();

    // beta after n steps from the given start, without iterating.
    static double closed_form(double beta0, double gamma, double epsilon_ratio,
                              std::uint64_t n);
};

}  // namespace freqreg
