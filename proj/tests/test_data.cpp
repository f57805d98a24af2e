#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "freqreg/data.hpp"

using namespace freqreg;

namespace {

void put_be32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    buf.push_back(static_cast<std::uint8_t>(v >> 24));
    buf.push_back(static_cast<std::uint8_t>(v >> 16));
    buf.push_back(static_cast<std::uint8_t>(v >> 8));
    buf.push_back(static_cast<std::uint8_t>(v));
}

struct Fixture {
    std::vector<std::uint8_t> images;
    std::vector<std::uint8_t> labels;
};

Fixture make_fixture(std::uint32_t count, std::uint32_t rows, std::uint32_t cols) {
    Fixture f;
    put_be32(f.images, 0x00000803);
    put_be32(f.images, count);
    put_be32(f.images, rows);
    put_be32(f.images, cols);
    for (std::uint32_t i = 0; i < count * rows * cols; ++i)
        f.images.push_back(static_cast<std::uint8_t>(i % 256));
    put_be32(f.labels, 0x00000801);
    put_be32(f.labels, count);
    for (std::uint32_t i = 0; i < count; ++i)
        f.labels.push_back(static_cast<std::uint8_t>(i % 10));
    return f;
}

}  // namespace

TEST_CASE("parse_idx reads a hand-crafted fixture") {
    const Fixture f = make_fixture(4, 28, 28);
    const LabeledDataset ds = parse_idx(f.images, f.labels);
    CHECK(ds.images.shape == std::vector<std::size_t>{4, 1, 28, 28});
    CHECK(ds.labels == std::vector<std::uint32_t>{0, 1, 2, 3});
    CHECK(ds.size() == 4);

    // Pixel byte 255 maps to exactly 1.0; all values stay in [0, 1].
    CHECK(ds.images[255] == 1.0);
    CHECK(ds.images[0] == 0.0);
    CHECK(ds.images[1] == doctest::Approx(1.0 / 255.0));
    for (double v : ds.images.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("parse_idx rejects malformed inputs") {
    Fixture f = make_fixture(2, 4, 4);

    Fixture bad_image_magic = f;
    bad_image_magic.images[3] = 0x07;
    CHECK_THROWS_WITH_AS(parse_idx(bad_image_magic.images, f.labels),
                         doctest::Contains("image magic"), DataError);

    Fixture bad_label_magic = f;
    bad_label_magic.labels[3] = 0x07;
    CHECK_THROWS_WITH_AS(parse_idx(f.images, bad_label_magic.labels),
                         doctest::Contains("label magic"), DataError);

    Fixture truncated = f;
    truncated.images.resize(truncated.images.size() - 3);
    CHECK_THROWS_AS(parse_idx(truncated.images, f.labels), DataError);

    const Fixture other = make_fixture(3, 4, 4);
    CHECK_THROWS_WITH_AS(parse_idx(f.images, other.labels), doctest::Contains("count"),
                         DataError);
}

TEST_CASE("load_idx round-trips through files") {
    const Fixture f = make_fixture(4, 6, 5);
    const auto dir = std::filesystem::temp_directory_path();
    const std::string ip = (dir / "freqreg_test_images.idx").string();
    const std::string lp = (dir / "freqreg_test_labels.idx").string();
    {
        std::ofstream(ip, std::ios::binary)
            .write(reinterpret_cast<const char*>(f.images.data()),
                   static_cast<std::streamsize>(f.images.size()));
        std::ofstream(lp, std::ios::binary)
            .write(reinterpret_cast<const char*>(f.labels.data()),
                   static_cast<std::streamsize>(f.labels.size()));
    }
    const LabeledDataset ds = load_idx(ip, lp);
    const LabeledDataset ref = parse_idx(f.images, f.labels);
    CHECK(ds.images.shape == ref.images.shape);
    CHECK(ds.images.data == ref.images.data);
    CHECK(ds.labels == ref.labels);
    std::remove(ip.c_str());
    std::remove(lp.c_str());

    CHECK_THROWS_AS(load_idx("/nonexistent/images", "/nonexistent/labels"), DataError);
}

TEST_CASE("synthetic blobs are deterministic and balanced") {
    const LabeledDataset a = synthetic_blobs(3, 40, 8, 99);
    const LabeledDataset b = synthetic_blobs(3, 40, 8, 99);
    CHECK(a.images.data == b.images.data);
    CHECK(a.labels == b.labels);
    CHECK(a.images.shape == std::vector<std::size_t>{120, 1, 1, 8});

    std::vector<int> counts(3, 0);
    for (auto l : a.labels) ++counts[l];
    for (int c : counts) CHECK(c == 40);

    for (double v : a.images.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    const LabeledDataset c = synthetic_blobs(3, 40, 8, 100);
    CHECK(a.images.data != c.images.data);
}

TEST_CASE("split_dataset keeps prefix balance") {
    const LabeledDataset all = synthetic_blobs(2, 30, 4, 7);
    const auto [train, test] = split_dataset(all, 40);
    CHECK(train.size() == 40);
    CHECK(test.size() == 20);
    int train_zero = 0;
    for (auto l : train.labels)
        if (l == 0) ++train_zero;
    CHECK(train_zero == 20);
    CHECK(train.images.data ==
          std::vector<double>(all.images.data.begin(), all.images.data.begin() + 40 * 4));

    CHECK_THROWS_AS(split_dataset(all, 0), std::invalid_argument);
    CHECK_THROWS_AS(split_dataset(all, 60), std::invalid_argument);
}
