#include "freqreg/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace freqreg {

TruncationSchedule::TruncationSchedule(double gamma_, double epsilon_ratio_)
    : gamma(gamma_), epsilon_ratio(epsilon_ratio_) {
    if (!(gamma > 0.0) || gamma >= 1.0)
        throw std::invalid_argument("TruncationSchedule: gamma must be in (0, 1)");
    if (!(epsilon_ratio > 0.0) || epsilon_ratio > 1.0)
        throw std::invalid_argument("TruncationSchedule: epsilon_ratio must be in (0, 1]");
}

void TruncationSchedule::step() {
    beta -= gamma * (beta - epsilon_ratio);
    ++epoch;
}

double TruncationSchedule::closed_form(double beta0, double gamma, double epsilon_ratio,
                                       std::uint64_t n) {
    return epsilon_ratio +
           std::pow(1.0 - gamma, static_cast<double>(n)) * (beta0 - epsilon_ratio);
}

}  // namespace freqreg
