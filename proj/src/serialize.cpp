#include "freqreg/serialize.hpp"

#include <cstring>
#include <fstream>

#include "freqreg/data.hpp"

namespace freqreg {

std::uint16_t float_to_half(float value) {
    std::uint32_t x;
    std::memcpy(&x, &value, 4);
    const std::uint16_t sign = static_cast<std::uint16_t>((x >> 16) & 0x8000u);
    const std::uint32_t exp = (x >> 23) & 0xffu;
    std::uint32_t mant = x & 0x7fffffu;
    if (exp == 0xffu)  // inf or nan
        return sign | 0x7c00u | (mant ? 0x200u : 0u);
    const int half_exp = static_cast<int>(exp) - 127 + 15;
    if (half_exp >= 0x1f) return sign | 0x7c00u;  // overflow to inf
    if (half_exp <= 0) {
        if (half_exp < -10) return sign;  // underflow to zero
        mant |= 0x800000u;                // make the leading 1 explicit
        const std::uint32_t shift = static_cast<std::uint32_t>(14 - half_exp);
        std::uint32_t half_mant = mant >> shift;
        const std::uint32_t rem = mant & ((1u << shift) - 1u);
        const std::uint32_t halfway = 1u << (shift - 1);
        if (rem > halfway || (rem == halfway && (half_mant & 1u))) ++half_mant;
        return sign | static_cast<std::uint16_t>(half_mant);
    }
    std::uint16_t h =
        sign | static_cast<std::uint16_t>(half_exp << 10) | static_cast<std::uint16_t>(mant >> 13);
    const std::uint32_t rem = mant & 0x1fffu;
    if (rem > 0x1000u || (rem == 0x1000u && (h & 1u))) ++h;  // carry rolls into the exponent
    return h;
}

float half_to_float(std::uint16_t bits) {
    const std::uint32_t sign = static_cast<std::uint32_t>(bits & 0x8000u) << 16;
    const std::uint32_t exp = (bits >> 10) & 0x1fu;
    std::uint32_t mant = bits & 0x3ffu;
    std::uint32_t x;
    if (exp == 0x1fu) {
        x = sign | 0x7f800000u | (mant << 13);
    } else if (exp == 0) {
        if (mant == 0) {
            x = sign;
        } else {
            int shifts = 0;
            do {
                ++shifts;
                mant <<= 1;
            } while (!(mant & 0x400u));
            mant &= 0x3ffu;
            x = sign | (static_cast<std::uint32_t>(113 - shifts) << 23) | (mant << 13);
        }
    } else {
        x = sign | ((exp + 112u) << 23) | (mant << 13);
    }
    float out;
    std::memcpy(&out, &x, 4);
    return out;
}

namespace {

constexpr std::uint8_t kFormatVersion = 1;

constexpr std::uint8_t kLayerDense = 0;
constexpr std::uint8_t kLayerConv2d = 1;
constexpr std::uint8_t kLayerRelu = 2;
constexpr std::uint8_t kLayerIdentity = 3;
constexpr std::uint8_t kLayerFlatten = 4;
constexpr std::uint8_t kLayerMaxPool2x2 = 5;

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_value(std::vector<std::uint8_t>& out, double v, CoeffDtype dtype) {
    if (dtype == CoeffDtype::Single) {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(out, bits);
    } else {
        put_u16(out, float_to_half(static_cast<float>(v)));
    }
}

struct Reader {
    const std::vector<std::uint8_t>& buf;
    std::size_t pos = 0;

    void need(std::size_t n, const char* what) const {
        if (pos + n > buf.size())
            throw DataError(std::string("packed data truncated while reading ") + what);
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return buf[pos++];
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = static_cast<std::uint16_t>(buf[pos]) |
                          static_cast<std::uint16_t>(buf[pos + 1]) << 8;
        pos += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    double value(CoeffDtype dtype, const char* what) {
        if (dtype == CoeffDtype::Single) {
            const std::uint32_t bits = u32(what);
            float f;
            std::memcpy(&f, &bits, 4);
            return static_cast<double>(f);
        }
        return static_cast<double>(half_to_float(u16(what)));
    }
    std::string str(const char* what) {
        const std::uint16_t n = u16(what);
        need(n, what);
        std::string s(reinterpret_cast<const char*>(buf.data() + pos), n);
        pos += n;
        return s;
    }
    void expect_magic(const char* magic) {
        need(4, "magic");
        if (std::memcmp(buf.data() + pos, magic, 4) != 0)
            throw DataError(std::string("bad magic, expected ") + magic);
        pos += 4;
    }
};

CoeffDtype read_dtype(Reader& r) {
    const std::uint8_t d = r.u8("dtype");
    if (d > 1) throw DataError("unknown dtype tag");
    return static_cast<CoeffDtype>(d);
}

std::size_t dtype_width(CoeffDtype dtype) { return dtype == CoeffDtype::Single ? 4 : 2; }

void pack_tensor_into(std::vector<std::uint8_t>& out, const FrequencyTensor& t,
                      CoeffDtype dtype) {
    out.push_back('F');
    out.push_back('R');
    out.push_back('T');
    out.push_back('1');
    put_u8(out, kFormatVersion);
    put_u8(out, static_cast<std::uint8_t>(t.shape().size()));
    for (std::size_t d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    put_u32(out, static_cast<std::uint32_t>(t.epsilon()));
    put_u8(out, static_cast<std::uint8_t>(dtype));
    const std::uint64_t count = t.nonzero_budget();
    put_u64(out, count);
    const ZigzagPlan& plan = t.plan();
    for (std::uint64_t i = 0; i < count; ++i)
        put_value(out, t.coefficients()[plan.order[i]], dtype);
}

struct TensorBody {
    TensorHeader header;
    std::vector<double> coeffs_in_order;  // only read when wanted
};

TensorHeader read_tensor_header(Reader& r) {
    r.expect_magic("FRT1");
    if (r.u8("version") != kFormatVersion) throw DataError("unsupported tensor format version");
    const std::uint8_t rank = r.u8("rank");
    if (rank < 1 || rank > kMaxRank) throw DataError("tensor rank out of range");
    TensorHeader h;
    for (std::uint8_t i = 0; i < rank; ++i) {
        const std::uint32_t d = r.u32("dimension");
        if (d == 0) throw DataError("zero tensor dimension");
        h.shape.push_back(d);
    }
    h.epsilon = r.u32("epsilon");
    if (h.epsilon < 1) throw DataError("epsilon must be at least 1");
    h.dtype = read_dtype(r);
    h.count = r.u64("count");
    return h;
}

FrequencyTensor unpack_tensor_from(Reader& r) {
    const TensorHeader h = read_tensor_header(r);
    const ZigzagPlan plan = build_plan(h.shape);
    if (h.count != plan.count_below(h.epsilon))
        throw DataError("coefficient count does not match counts[epsilon]");
    DenseTensor coeffs(h.shape);
    for (std::uint64_t i = 0; i < h.count; ++i)
        coeffs[plan.order[i]] = r.value(h.dtype, "coefficient");
    return FrequencyTensor::from_coefficients(std::move(coeffs), h.epsilon);
}

FrequencyTensor layer_weight_as_frequency(const DenseLayer& d) {
    if (d.regularized()) return d.weight();
    return FrequencyTensor::from_spatial(d.plain_weight(),
                                         build_plan(d.plain_weight().shape).max_threshold());
}

FrequencyTensor layer_weight_as_frequency(const Conv2dLayer& c) {
    if (c.regularized()) return c.weight();
    return FrequencyTensor::from_spatial(c.plain_weight(),
                                         build_plan(c.plain_weight().shape).max_threshold());
}

void put_bias(std::vector<std::uint8_t>& out, const std::vector<double>& bias,
              CoeffDtype dtype) {
    put_u32(out, static_cast<std::uint32_t>(bias.size()));
    for (double b : bias) put_value(out, b, dtype);
}

std::vector<double> read_bias(Reader& r, CoeffDtype dtype) {
    const std::uint32_t n = r.u32("bias length");
    std::vector<double> bias(n);
    for (std::uint32_t i = 0; i < n; ++i) bias[i] = r.value(dtype, "bias");
    return bias;
}

}  // namespace

std::vector<std::uint8_t> pack_tensor(const FrequencyTensor& t, CoeffDtype dtype) {
    if (t.shape().empty() || t.shape().size() > kMaxRank)
        throw std::invalid_argument("pack_tensor: rank must be 1..4");
    std::vector<std::uint8_t> out;
    pack_tensor_into(out, t, dtype);
    return out;
}

FrequencyTensor unpack_tensor(const std::vector<std::uint8_t>& bytes) {
    Reader r{bytes};
    FrequencyTensor t = unpack_tensor_from(r);
    if (r.pos != bytes.size()) throw DataError("trailing bytes after packed tensor");
    return t;
}

TensorHeader inspect_tensor(const std::vector<std::uint8_t>& bytes) {
    Reader r{bytes};
    return read_tensor_header(r);
}

std::vector<std::uint8_t> pack_model(const Model& model, CoeffDtype dtype) {
    if (model.layers.empty()) throw std::invalid_argument("pack_model: empty model");
    std::vector<std::uint8_t> out;
    out.push_back('F');
    out.push_back('R');
    out.push_back('M');
    out.push_back('1');
    put_u8(out, kFormatVersion);
    put_u8(out, static_cast<std::uint8_t>(dtype));
    put_u32(out, static_cast<std::uint32_t>(model.layers.size()));
    for (const auto& l : model.layers) {
        put_u16(out, static_cast<std::uint16_t>(l.name.size()));
        out.insert(out.end(), l.name.begin(), l.name.end());
        if (const auto* d = dynamic_cast<const DenseLayer*>(l.layer.get())) {
            put_u8(out, kLayerDense);
            put_u32(out, static_cast<std::uint32_t>(d->out_features()));
            put_u32(out, static_cast<std::uint32_t>(d->in_features()));
            std::vector<std::uint8_t> blob;
            pack_tensor_into(blob, layer_weight_as_frequency(*d), dtype);
            put_u64(out, blob.size());
            out.insert(out.end(), blob.begin(), blob.end());
            put_u8(out, d->has_bias() ? 1 : 0);
            if (d->has_bias()) put_bias(out, d->bias(), dtype);
        } else if (const auto* c = dynamic_cast<const Conv2dLayer*>(l.layer.get())) {
            put_u8(out, kLayerConv2d);
            for (std::size_t dim : c->weight_shape())
                put_u32(out, static_cast<std::uint32_t>(dim));
            put_u32(out, static_cast<std::uint32_t>(c->stride()));
            put_u32(out, static_cast<std::uint32_t>(c->padding()));
            std::vector<std::uint8_t> blob;
            pack_tensor_into(blob, layer_weight_as_frequency(*c), dtype);
            put_u64(out, blob.size());
            out.insert(out.end(), blob.begin(), blob.end());
            put_u8(out, c->has_bias() ? 1 : 0);
            if (c->has_bias()) put_bias(out, c->bias(), dtype);
        } else if (const auto* a = dynamic_cast<const ActivationLayer*>(l.layer.get())) {
            put_u8(out, a->activation() == ActivationKind::Relu ? kLayerRelu : kLayerIdentity);
        } else if (dynamic_cast<const FlattenLayer*>(l.layer.get())) {
            put_u8(out, kLayerFlatten);
        } else if (dynamic_cast<const MaxPool2x2Layer*>(l.layer.get())) {
            put_u8(out, kLayerMaxPool2x2);
        } else {
            throw std::invalid_argument("pack_model: unsupported layer kind");
        }
    }
    return out;
}

Model unpack_model(const std::vector<std::uint8_t>& bytes) {
    Reader r{bytes};
    r.expect_magic("FRM1");
    if (r.u8("version") != kFormatVersion) throw DataError("unsupported model format version");
    const CoeffDtype dtype = read_dtype(r);
    const std::uint32_t layer_count = r.u32("layer count");
    if (layer_count == 0) throw DataError("model has no layers");

    Model m;
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        std::string name = r.str("layer name");
        const std::uint8_t kind = r.u8("layer kind");
        switch (kind) {
            case kLayerDense: {
                const std::uint32_t out_f = r.u32("out features");
                const std::uint32_t in_f = r.u32("in features");
                const std::uint64_t blob_len = r.u64("tensor blob length");
                r.need(blob_len, "tensor blob");
                FrequencyTensor w = unpack_tensor_from(r);
                if (w.shape() != std::vector<std::size_t>{out_f, in_f})
                    throw DataError("dense weight shape does not match descriptor");
                std::optional<std::vector<double>> bias;
                if (r.u8("has bias")) bias = read_bias(r, dtype);
                m.add(std::move(name), std::make_unique<DenseLayer>(std::move(w), std::move(bias)));
                break;
            }
            case kLayerConv2d: {
                std::vector<std::size_t> shape(4);
                for (auto& d : shape) d = r.u32("conv dimension");
                const std::uint32_t stride = r.u32("stride");
                const std::uint32_t padding = r.u32("padding");
                const std::uint64_t blob_len = r.u64("tensor blob length");
                r.need(blob_len, "tensor blob");
                FrequencyTensor w = unpack_tensor_from(r);
                if (w.shape() != shape)
                    throw DataError("conv weight shape does not match descriptor");
                std::optional<std::vector<double>> bias;
                if (r.u8("has bias")) bias = read_bias(r, dtype);
                m.add(std::move(name), std::make_unique<Conv2dLayer>(std::move(w), std::move(bias),
                                                                     stride, padding));
                break;
            }
            case kLayerRelu:
                m.add(std::move(name), std::make_unique<ActivationLayer>(ActivationKind::Relu));
                break;
            case kLayerIdentity:
                m.add(std::move(name), std::make_unique<ActivationLayer>(ActivationKind::Identity));
                break;
            case kLayerFlatten:
                m.add(std::move(name), std::make_unique<FlattenLayer>());
                break;
            case kLayerMaxPool2x2:
                m.add(std::move(name), std::make_unique<MaxPool2x2Layer>());
                break;
            default:
                throw DataError("unknown layer kind tag");
        }
    }
    if (r.pos != bytes.size()) throw DataError("trailing bytes after packed model");
    return m;
}

PackedSizes packed_sizes(const std::vector<std::uint8_t>& model_bytes) {
    Reader r{model_bytes};
    r.expect_magic("FRM1");
    if (r.u8("version") != kFormatVersion) throw DataError("unsupported model format version");
    const CoeffDtype dtype = read_dtype(r);
    const std::uint32_t layer_count = r.u32("layer count");
    PackedSizes sizes{model_bytes.size(), 0, 0};
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        r.str("layer name");
        const std::uint8_t kind = r.u8("layer kind");
        if (kind == kLayerDense || kind == kLayerConv2d) {
            if (kind == kLayerDense) {
                r.u32("out features");
                r.u32("in features");
            } else {
                for (int k = 0; k < 4; ++k) r.u32("conv dimension");
                r.u32("stride");
                r.u32("padding");
            }
            const std::uint64_t blob_len = r.u64("tensor blob length");
            const std::size_t blob_start = r.pos;
            const TensorHeader h = read_tensor_header(r);
            sizes.coefficient_count += h.count;
            sizes.coefficient_bytes += h.count * dtype_width(h.dtype);
            r.pos = blob_start + blob_len;
            if (r.u8("has bias")) {
                const std::uint32_t n = r.u32("bias length");
                r.need(n * dtype_width(dtype), "bias payload");
                r.pos += n * dtype_width(dtype);
            }
        }
    }
    return sizes;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("failed writing " + path);
}

}  // namespace freqreg
