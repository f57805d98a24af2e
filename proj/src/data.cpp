#include "freqreg/data.hpp"

#include <algorithm>
#include <fstream>

#include "freqreg/rng.hpp"

namespace freqreg {

namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset,
                        const char* what) {
    if (offset + 4 > buf.size())
        throw DataError(std::string("idx: truncated file while reading ") + what);
    return (static_cast<std::uint32_t>(buf[offset]) << 24) |
           (static_cast<std::uint32_t>(buf[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(buf[offset + 2]) << 8) |
           static_cast<std::uint32_t>(buf[offset + 3]);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("idx: cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

LabeledDataset parse_idx(const std::vector<std::uint8_t>& image_bytes,
                         const std::vector<std::uint8_t>& label_bytes) {
    const std::uint32_t image_magic = read_be32(image_bytes, 0, "image magic");
    if (image_magic != 0x00000803)
        throw DataError("idx: bad image magic (expected 0x00000803)");
    const std::uint32_t label_magic = read_be32(label_bytes, 0, "label magic");
    if (label_magic != 0x00000801)
        throw DataError("idx: bad label magic (expected 0x00000801)");

    const std::uint32_t count = read_be32(image_bytes, 4, "image count");
    const std::uint32_t rows = read_be32(image_bytes, 8, "image rows");
    const std::uint32_t cols = read_be32(image_bytes, 12, "image cols");
    const std::uint32_t label_count = read_be32(label_bytes, 4, "label count");
    if (count != label_count)
        throw DataError("idx: image count does not match label count");

    const std::size_t pixels = static_cast<std::size_t>(count) * rows * cols;
    if (image_bytes.size() < 16 + pixels) throw DataError("idx: truncated image data");
    if (label_bytes.size() < 8 + count) throw DataError("idx: truncated label data");

    LabeledDataset ds;
    ds.images = DenseTensor({count, 1, rows, cols});
    for (std::size_t i = 0; i < pixels; ++i)
        ds.images[i] = static_cast<double>(image_bytes[16 + i]) / 255.0;
    ds.labels.resize(count);
    std::uint32_t max_label = 0;
    for (std::size_t i = 0; i < count; ++i) {
        ds.labels[i] = label_bytes[8 + i];
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.num_classes = std::max<std::size_t>(10, max_label + 1);
    return ds;
}

LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    return parse_idx(read_file(images_path), read_file(labels_path));
}

LabeledDataset synthetic_blobs(std::size_t num_classes, std::size_t per_class,
                               std::size_t dim, std::uint64_t seed) {
    if (num_classes == 0 || per_class == 0 || dim == 0)
        throw std::invalid_argument("synthetic_blobs: all sizes must be positive");
    Rng rng(seed);

    // Centers stay well inside [0, 1] so the clipped noise never moves a
    // sample into another cluster.
    const double sigma = 0.02;
    std::vector<double> centers(num_classes * dim);
    for (double& c : centers) c = rng.uniform(0.25, 0.75);

    const std::size_t count = num_classes * per_class;
    LabeledDataset ds;
    ds.images = DenseTensor({count, 1, 1, dim});
    ds.labels.resize(count);
    ds.num_classes = num_classes;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t cls = i % num_classes;
        ds.labels[i] = static_cast<std::uint32_t>(cls);
        double* row = ds.images.data.data() + i * dim;
        for (std::size_t d = 0; d < dim; ++d) {
            const double v = centers[cls * dim + d] + sigma * rng.normal();
            row[d] = std::clamp(v, 0.0, 1.0);
        }
    }
    return ds;
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& ds,
                                                        std::size_t first) {
    if (first == 0 || first >= ds.size())
        throw std::invalid_argument("split_dataset: split point out of range");
    const std::size_t sample = ds.images.numel() / ds.size();
    auto take = [&](std::size_t begin, std::size_t end) {
        LabeledDataset part;
        std::vector<std::size_t> shape = ds.images.shape;
        shape[0] = end - begin;
        part.images = DenseTensor(shape);
        std::copy_n(ds.images.data.data() + begin * sample, (end - begin) * sample,
                    part.images.data.data());
        part.labels.assign(ds.labels.begin() + begin, ds.labels.begin() + end);
        part.num_classes = ds.num_classes;
        return part;
    };
    return {take(0, first), take(first, ds.size())};
}

}  // namespace freqreg
