// Independent reference implementations the tests check the library against.
// Everything here evaluates definitions directly (explicit sums, brute-force
// enumeration) and shares no code with the implementation paths under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "freqreg/tensor.hpp"

namespace oracle {

inline std::vector<std::size_t> unflatten(std::size_t flat,
                                          const std::vector<std::size_t>& shape) {
    std::vector<std::size_t> idx(shape.size());
    for (std::size_t a = shape.size(); a-- > 0;) {
        idx[a] = flat % shape[a];
        flat /= shape[a];
    }
    return idx;
}

// W(y) = sum_x T(x) * prod_i cos[(pi/D_i)(y_i+1/2)x_i], evaluated literally.
inline freqreg::DenseTensor brute_idct(const freqreg::DenseTensor& coeffs) {
    const auto& shape = coeffs.shape;
    freqreg::DenseTensor out(shape);
    const std::size_t n = coeffs.numel();
    for (std::size_t yf = 0; yf < n; ++yf) {
        const auto y = unflatten(yf, shape);
        double acc = 0.0;
        for (std::size_t xf = 0; xf < n; ++xf) {
            const auto x = unflatten(xf, shape);
            double basis = 1.0;
            for (std::size_t i = 0; i < shape.size(); ++i)
                basis *= std::cos(std::numbers::pi / static_cast<double>(shape[i]) *
                                  (static_cast<double>(y[i]) + 0.5) * static_cast<double>(x[i]));
            acc += coeffs[xf] * basis;
        }
        out[yf] = acc;
    }
    return out;
}

// Transpose of the map above: out(x) = sum_y g(y) * prod_i cos[...].
inline freqreg::DenseTensor brute_adjoint(const freqreg::DenseTensor& g) {
    const auto& shape = g.shape;
    freqreg::DenseTensor out(shape);
    const std::size_t n = g.numel();
    for (std::size_t xf = 0; xf < n; ++xf) {
        const auto x = unflatten(xf, shape);
        double acc = 0.0;
        for (std::size_t yf = 0; yf < n; ++yf) {
            const auto y = unflatten(yf, shape);
            double basis = 1.0;
            for (std::size_t i = 0; i < shape.size(); ++i)
                basis *= std::cos(std::numbers::pi / static_cast<double>(shape[i]) *
                                  (static_cast<double>(y[i]) + 0.5) * static_cast<double>(x[i]));
            acc += g[yf] * basis;
        }
        out[xf] = acc;
    }
    return out;
}

inline std::size_t l1_norm(std::size_t flat, const std::vector<std::size_t>& shape) {
    std::size_t s = 0;
    for (std::size_t a = shape.size(); a-- > 0;) {
        s += flat % shape[a];
        flat /= shape[a];
    }
    return s;
}

// Number of index vectors with |x|_1 < epsilon, by full enumeration.
inline std::uint64_t brute_count_below(const std::vector<std::size_t>& shape,
                                       std::size_t epsilon) {
    std::uint64_t count = 0;
    for (std::size_t f = 0; f < freqreg::shape_numel(shape); ++f)
        if (l1_norm(f, shape) < epsilon) ++count;
    return count;
}

inline freqreg::DenseTensor brute_mask(const std::vector<std::size_t>& shape,
                                       std::size_t epsilon) {
    freqreg::DenseTensor m(shape);
    for (std::size_t f = 0; f < m.numel(); ++f)
        m[f] = l1_norm(f, shape) < epsilon ? 1.0 : 0.0;
    return m;
}

// Sliding-window 2D convolution, batch x channels, zero padding.
inline freqreg::DenseTensor brute_conv2d(const freqreg::DenseTensor& x,
                                         const freqreg::DenseTensor& w,
                                         const std::vector<double>& bias, std::size_t stride,
                                         std::size_t padding) {
    const std::size_t batch = x.shape[0], in_ch = x.shape[1], h = x.shape[2], wd = x.shape[3];
    const std::size_t out_ch = w.shape[0], kh = w.shape[2], kw = w.shape[3];
    const std::size_t oh = (h + 2 * padding - kh) / stride + 1;
    const std::size_t ow = (wd + 2 * padding - kw) / stride + 1;
    freqreg::DenseTensor z({batch, out_ch, oh, ow});
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t oc = 0; oc < out_ch; ++oc)
            for (std::size_t oy = 0; oy < oh; ++oy)
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    double acc = bias.empty() ? 0.0 : bias[oc];
                    for (std::size_t ic = 0; ic < in_ch; ++ic)
                        for (std::size_t ky = 0; ky < kh; ++ky)
                            for (std::size_t kx = 0; kx < kw; ++kx) {
                                const std::ptrdiff_t iy =
                                    static_cast<std::ptrdiff_t>(oy * stride + ky) -
                                    static_cast<std::ptrdiff_t>(padding);
                                const std::ptrdiff_t ix =
                                    static_cast<std::ptrdiff_t>(ox * stride + kx) -
                                    static_cast<std::ptrdiff_t>(padding);
                                if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h) || ix < 0 ||
                                    ix >= static_cast<std::ptrdiff_t>(wd))
                                    continue;
                                acc += x.at({b, ic, static_cast<std::size_t>(iy),
                                             static_cast<std::size_t>(ix)}) *
                                       w.at({oc, ic, ky, kx});
                            }
                    z.at({b, oc, oy, ox}) = acc;
                }
    return z;
}

inline double max_abs_diff(const freqreg::DenseTensor& a, const freqreg::DenseTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const freqreg::DenseTensor& a) {
    double m = 0.0;
    for (double v : a.data) m = std::max(m, std::abs(v));
    return m;
}

inline double dot(const freqreg::DenseTensor& a, const freqreg::DenseTensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) s += a[i] * b[i];
    return s;
}

// Half-precision rounding reference built on rint (round-to-nearest-even),
// independent of the bit-twiddling converters.
inline float ref_half_round(float f) {
    if (std::isnan(f) || std::isinf(f)) return f;
    const float af = std::fabs(f);
    if (af == 0.0f) return f;
    if (af >= 65520.0f)
        return std::copysign(std::numeric_limits<float>::infinity(), f);
    int e = std::ilogb(af);
    if (e < -14) e = -14;  // subnormal range shares the 2^-24 quantum
    const double q = std::ldexp(1.0, e - 10);
    const double r = std::rint(static_cast<double>(af) / q) * q;
    return std::copysign(static_cast<float>(r), f);
}

}  // namespace oracle
