#include <cmath>

#include "doctest.h"
#include "freqreg/model.hpp"
#include "freqreg/rng.hpp"
#include "freqreg/schedule.hpp"
#include "freqreg/train.hpp"

using namespace freqreg;

TEST_CASE("step applies the decay recurrence") {
    TruncationSchedule s(0.01, 0.01);
    CHECK(s.beta == 1.0);
    s.step();
    CHECK(s.beta == doctest::Approx(0.9901).epsilon(1e-15));
    CHECK(s.epoch == 1);

    TruncationSchedule fixed(0.05, 0.25);
    fixed.beta = 0.25;
    fixed.step();
    CHECK(fixed.beta == 0.25);

    CHECK_THROWS_AS(TruncationSchedule(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(TruncationSchedule(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("iterated recurrence equals the closed form") {
    TruncationSchedule s(0.01, 0.01);
    for (int n = 1; n <= 100; ++n) {
        s.step();
        CHECK(std::abs(s.beta - TruncationSchedule::closed_form(1.0, 0.01, 0.01, n)) < 1e-12);
    }
}

TEST_CASE("beta decays monotonically within bounds") {
    TruncationSchedule s(0.03, 0.1);
    double prev = s.beta;
    for (int n = 0; n < 500; ++n) {
        s.step();
        CHECK(s.beta <= prev);
        CHECK(s.beta >= s.epsilon_ratio);
        CHECK(s.beta <= 1.0);
        prev = s.beta;
    }
    CHECK(std::abs(s.beta - 0.1) < 1e-6);
}

TEST_CASE("thresholds_for_model assigns per-tensor boundaries") {
    Model m;
    Rng rng(1);
    DenseTensor w({3, 3});
    for (double& v : w.data) v = rng.uniform(-1.0, 1.0);
    m.add("fc", std::make_unique<DenseLayer>(w, std::nullopt, true,
                                             build_plan(w.shape).max_threshold()));

    TruncationSchedule full(0.01, 1.0);
    for (const auto& a : thresholds_for_model(full, m, 1)) {
        CHECK(a.epsilon == a.tensor->plan().max_threshold());
        CHECK(a.kept == a.tensor->plan().total());
    }

    TruncationSchedule s(0.01, 0.01);
    s.beta = 0.34;
    const auto first = thresholds_for_model(s, m, 1);
    REQUIRE(first.size() == 1);
    CHECK(first[0].epsilon == 2);
    CHECK(first[0].kept == 3);

    const auto second = thresholds_for_model(s, m, 1);
    REQUIRE(second.size() == first.size());
    CHECK(second[0].epsilon == first[0].epsilon);
    CHECK(second[0].kept == first[0].kept);

    // Assignments never grow past the tensor's current threshold.
    first[0].tensor->apply_truncation(1);
    s.beta = 1.0;
    const auto clamped = thresholds_for_model(s, m, 1);
    CHECK(clamped[0].epsilon == 1);
}
