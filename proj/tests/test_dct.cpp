#include <cmath>
#include <numbers>

#include "doctest.h"
#include "freqreg/dct.hpp"
#include "freqreg/rng.hpp"
#include "oracles.hpp"

using namespace freqreg;

namespace {

DenseTensor random_tensor(const std::vector<std::size_t>& shape, Rng& rng) {
    DenseTensor t(shape);
    for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
    return t;
}

}  // namespace

TEST_CASE("idct_1d basis vectors") {
    CHECK(idct_1d({1.0, 0.0}) == std::vector<double>{1.0, 1.0});

    const auto w = idct_1d({0.0, 1.0});
    CHECK(w[0] == doctest::Approx(std::cos(std::numbers::pi / 4)).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(std::cos(3 * std::numbers::pi / 4)).epsilon(1e-12));
    CHECK(w[0] == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(w[1] == doctest::Approx(-0.70711).epsilon(1e-4));

    const auto c = idct_1d({2.0, 0.0, 0.0});
    for (double v : c) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(idct_1d({}), std::invalid_argument);
}

TEST_CASE("dct_1d inverts idct_1d") {
    const auto t = dct_1d({1.0, 1.0});
    CHECK(t[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t[1] == doctest::Approx(0.0).epsilon(1e-12));

    const auto t2 = dct_1d({std::cos(std::numbers::pi / 4), std::cos(3 * std::numbers::pi / 4)});
    CHECK(t2[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t2[1] == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(11);
    std::vector<double> v(16);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    const auto round = idct_1d(dct_1d(v));
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(round[i] == doctest::Approx(v[i]).epsilon(1e-10));

    CHECK_THROWS_AS(dct_1d({}), std::invalid_argument);
}

TEST_CASE("idct_nd matches the explicit sum") {
    DenseTensor dc({2, 2});
    dc.at({0, 0}) = 1.0;
    const auto ones = idct_nd(dc);
    for (double v : ones.data) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    DenseTensor row({2, 2});
    row.at({1, 0}) = 1.0;
    const auto w = idct_nd(row);
    CHECK(w.at({0, 0}) == doctest::Approx(std::cos(std::numbers::pi / 4)).epsilon(1e-12));
    CHECK(w.at({0, 1}) == doctest::Approx(std::cos(std::numbers::pi / 4)).epsilon(1e-12));
    CHECK(w.at({1, 0}) == doctest::Approx(std::cos(3 * std::numbers::pi / 4)).epsilon(1e-12));
    CHECK(w.at({1, 1}) == doctest::Approx(std::cos(3 * std::numbers::pi / 4)).epsilon(1e-12));

    Rng rng(5);
    const DenseTensor t = random_tensor({3, 2, 2}, rng);
    CHECK(oracle::max_abs_diff(idct_nd(t), oracle::brute_idct(t)) < 1e-10);

    CHECK_THROWS_AS(DenseTensor(std::vector<std::size_t>{}), std::invalid_argument);
    CHECK_THROWS_AS(DenseTensor({2, 2, 2, 2, 2}), std::invalid_argument);
}

TEST_CASE("dct_nd is the exact inverse of idct_nd") {
    DenseTensor c({3, 4});
    for (double& v : c.data) v = 2.5;
    const auto t = dct_nd(c);
    CHECK(t.at({0, 0}) == doctest::Approx(2.5).epsilon(1e-12));
    for (std::size_t i = 1; i < t.numel(); ++i) CHECK(std::abs(t[i]) < 1e-12);

    Rng rng(7);
    for (int rep = 0; rep < 5; ++rep) {
        const DenseTensor v = random_tensor({5, 3, 2, 6}, rng);
        CHECK(oracle::max_abs_diff(idct_nd(dct_nd(v)), v) < 1e-10);
        CHECK(oracle::max_abs_diff(dct_nd(idct_nd(v)), v) < 1e-10);
    }
}

TEST_CASE("idct_nd_adjoint is the transpose") {
    const auto adj = idct_nd_adjoint(DenseTensor({2}, {1.0, 0.0}));
    CHECK(adj[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(adj[1] == doctest::Approx(std::cos(std::numbers::pi / 4)).epsilon(1e-12));

    Rng rng(9);
    for (const auto& shape : std::vector<std::vector<std::size_t>>{
             {7}, {4, 5}, {3, 2, 4}, {2, 3, 2, 2}}) {
        for (int rep = 0; rep < 100; ++rep) {
            const DenseTensor t = random_tensor(shape, rng);
            const DenseTensor g = random_tensor(shape, rng);
            CHECK(oracle::dot(idct_nd(t), g) ==
                  doctest::Approx(oracle::dot(t, idct_nd_adjoint(g))).epsilon(1e-10));
        }
    }

    const auto zero = idct_nd_adjoint(DenseTensor({3, 3}));
    for (double v : zero.data) CHECK(v == 0.0);
}

TEST_CASE("idct_nd_adjoint matches the brute-force transpose") {
    Rng rng(13);
    for (const auto& shape :
         std::vector<std::vector<std::size_t>>{{6}, {3, 5}, {2, 3, 4}, {2, 2, 3, 3}}) {
        const DenseTensor g = random_tensor(shape, rng);
        CHECK(oracle::max_abs_diff(idct_nd_adjoint(g), oracle::brute_adjoint(g)) < 1e-10);
    }
}

TEST_CASE("round trip across ranks and sizes") {
    Rng rng(21);
    for (const auto& shape : std::vector<std::vector<std::size_t>>{
             {32}, {1}, {31, 2}, {8, 8}, {4, 5, 6}, {3, 3, 3, 3}, {2, 16, 2, 4}}) {
        const DenseTensor v = random_tensor(shape, rng);
        const double err = oracle::max_abs_diff(idct_nd(dct_nd(v)), v);
        CHECK(err <= 1e-8 * oracle::max_abs(v));
    }
}

TEST_CASE("idct_nd is linear") {
    Rng rng(23);
    const DenseTensor t1 = random_tensor({4, 3}, rng);
    const DenseTensor t2 = random_tensor({4, 3}, rng);
    const double a = 1.7, b = -0.3;
    DenseTensor mix({4, 3});
    for (std::size_t i = 0; i < mix.numel(); ++i) mix[i] = a * t1[i] + b * t2[i];
    const DenseTensor lhs = idct_nd(mix);
    const DenseTensor w1 = idct_nd(t1);
    const DenseTensor w2 = idct_nd(t2);
    for (std::size_t i = 0; i < lhs.numel(); ++i)
        CHECK(lhs[i] == doctest::Approx(a * w1[i] + b * w2[i]).epsilon(1e-10));
}

TEST_CASE("separable equals brute force on small shapes") {
    Rng rng(29);
    for (const auto& shape : std::vector<std::vector<std::size_t>>{
             {16}, {16, 16}, {4, 4, 4, 4}, {2, 8, 4, 2}, {256}, {5, 7, 7}}) {
        REQUIRE(shape_numel(shape) <= 256);
        const DenseTensor t = random_tensor(shape, rng);
        CHECK(oracle::max_abs_diff(idct_nd(t), oracle::brute_idct(t)) < 1e-10);
    }
}
