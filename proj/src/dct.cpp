#include "freqreg/dct.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace freqreg {

const std::vector<double>& cosine_table(std::size_t dim) {
    static std::mutex mu;
    static std::unordered_map<std::size_t, std::unique_ptr<std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& entry = cache[dim];
    if (!entry) {
        entry = std::make_unique<std::vector<double>>(dim * dim);
        const double step = std::numbers::pi / static_cast<double>(dim);
        for (std::size_t x = 0; x < dim; ++x)
            for (std::size_t y = 0; y < dim; ++y)
                (*entry)[x * dim + y] =
                    std::cos(step * (static_cast<double>(y) + 0.5) * static_cast<double>(x));
    }
    return *entry;
}

namespace {

// One output line from one input line.  `tab` is cosine_table(d).

void idct_line(const double* in, double* out, std::size_t d, const double* tab) {
    // Trailing zero coefficients contribute nothing; common after truncation.
    std::size_t last = d;
    while (last > 0 && in[last - 1] == 0.0) --last;
    for (std::size_t y = 0; y < d; ++y) out[y] = 0.0;
    for (std::size_t x = 0; x < last; ++x) {
        const double c = in[x];
        if (c == 0.0) continue;
        const double* row = tab + x * d;
        for (std::size_t y = 0; y < d; ++y) out[y] += c * row[y];
    }
}

void dct_line(const double* in, double* out, std::size_t d, const double* tab) {
    double dc = 0.0;
    for (std::size_t y = 0; y < d; ++y) dc += in[y];
    out[0] = dc / static_cast<double>(d);
    const double scale = 2.0 / static_cast<double>(d);
    for (std::size_t x = 1; x < d; ++x) {
        const double* row = tab + x * d;
        double acc = 0.0;
        for (std::size_t y = 0; y < d; ++y) acc += in[y] * row[y];
        out[x] = scale * acc;
    }
}

void adjoint_line(const double* in, double* out, std::size_t d, std::size_t out_limit,
                  const double* tab) {
    for (std::size_t x = 0; x < out_limit; ++x) {
        const double* row = tab + x * d;
        double acc = 0.0;
        for (std::size_t y = 0; y < d; ++y) acc += in[y] * row[y];
        out[x] = acc;
    }
    for (std::size_t x = out_limit; x < d; ++x) out[x] = 0.0;
}

enum class LineOp { Idct, Dct, Adjoint };

DenseTensor apply_along_axes(const DenseTensor& t, LineOp op, std::size_t out_limit) {
    DenseTensor result = t;
    const std::size_t rank = t.rank();
    std::vector<double> in_line, out_line;
    for (std::size_t axis = 0; axis < rank; ++axis) {
        const std::size_t d = t.shape[axis];
        const double* tab = cosine_table(d).data();
        const std::size_t limit = std::min(out_limit, d);
        in_line.resize(d);
        out_line.resize(d);

        std::size_t inner = 1;  // stride of this axis
        for (std::size_t a = axis + 1; a < rank; ++a) inner *= t.shape[a];
        std::size_t outer = result.numel() / (d * inner);

        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t i = 0; i < inner; ++i) {
                double* base = result.data.data() + o * d * inner + i;
                for (std::size_t k = 0; k < d; ++k) in_line[k] = base[k * inner];
                switch (op) {
                    case LineOp::Idct: idct_line(in_line.data(), out_line.data(), d, tab); break;
                    case LineOp::Dct: dct_line(in_line.data(), out_line.data(), d, tab); break;
                    case LineOp::Adjoint:
                        adjoint_line(in_line.data(), out_line.data(), d, limit, tab);
                        break;
                }
                for (std::size_t k = 0; k < d; ++k) base[k * inner] = out_line[k];
            }
        }
    }
    return result;
}

}  // namespace

std::vector<double> idct_1d(const std::vector<double>& coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("idct_1d: empty input");
    std::vector<double> out(coeffs.size());
    idct_line(coeffs.data(), out.data(), coeffs.size(), cosine_table(coeffs.size()).data());
    return out;
}

std::vector<double> dct_1d(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("dct_1d: empty input");
    std::vector<double> out(values.size());
    dct_line(values.data(), out.data(), values.size(), cosine_table(values.size()).data());
    return out;
}

DenseTensor idct_nd(const DenseTensor& coeffs) {
    return apply_along_axes(coeffs, LineOp::Idct, SIZE_MAX);
}

DenseTensor dct_nd(const DenseTensor& values) {
    return apply_along_axes(values, LineOp::Dct, SIZE_MAX);
}

DenseTensor idct_nd_adjoint(const DenseTensor& cotangent) {
    return apply_along_axes(cotangent, LineOp::Adjoint, SIZE_MAX);
}

DenseTensor idct_nd_adjoint_limited(const DenseTensor& cotangent, std::size_t out_limit) {
    return apply_along_axes(cotangent, LineOp::Adjoint, out_limit);
}

}  // namespace freqreg
