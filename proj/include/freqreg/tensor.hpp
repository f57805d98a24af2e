#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace freqreg {

constexpr std::size_t kMaxRank = 4;

inline std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

// Row-major dense tensor of doubles, rank 1..4.
struct DenseTensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    DenseTensor() = default;

    explicit DenseTensor(std::vector<std::size_t> s)
        : shape(std::move(s)), data(shape_numel(shape), 0.0) {
        validate_shape();
    }

    DenseTensor(std::vector<std::size_t> s, std::vector<double> d)
        : shape(std::move(s)), data(std::move(d)) {
        validate_shape();
        if (data.size() != shape_numel(shape))
            throw std::invalid_argument("tensor data length does not match shape");
    }

    std::size_t rank() const { return shape.size(); }
    std::size_t numel() const { return data.size(); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    std::size_t flat_index(std::initializer_list<std::size_t> idx) const {
        std::size_t flat = 0;
        std::size_t axis = 0;
        for (std::size_t i : idx) flat = flat * shape[axis++] + i;
        return flat;
    }

    double& at(std::initializer_list<std::size_t> idx) { return data[flat_index(idx)]; }
    double at(std::initializer_list<std::size_t> idx) const { return data[flat_index(idx)]; }

private:
    void validate_shape() const {
        if (shape.empty())
            throw std::invalid_argument("tensor rank must be at least 1");
        if (shape.size() > kMaxRank)
            throw std::invalid_argument("tensor rank must be at most 4");
        for (std::size_t d : shape)
            if (d == 0) throw std::invalid_argument("tensor dimensions must be positive");
    }
};

}  // namespace freqreg
