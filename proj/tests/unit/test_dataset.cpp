#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fbw/dataset.hpp"
#include "fbw/errors.hpp"
#include "fbw/idx.hpp"
#include "fbw/network.hpp"
#include "fbw/rng.hpp"

using namespace fbw;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("fbw_test_" + name);
}

std::vector<std::uint8_t> be32(std::uint32_t v) {
    return {std::uint8_t(v >> 24), std::uint8_t(v >> 16), std::uint8_t(v >> 8), std::uint8_t(v)};
}

}  // namespace

TEST_CASE("IDX image header example") {
    std::vector<std::uint8_t> bytes{0x00, 0x00, 0x08, 0x03};
    for (std::uint32_t v : {2u, 28u, 28u}) {
        const auto b = be32(v);
        bytes.insert(bytes.end(), b.begin(), b.end());
    }
    bytes.resize(bytes.size() + 2 * 784, 0);
    const IdxImages images = parse_idx_images(bytes);
    CHECK(images.count == 2);
    CHECK(images.rows * images.cols == 784);
    CHECK(images.pixels.size() == 2 * 784);
}

TEST_CASE("IDX format errors carry byte offsets") {
    std::vector<std::uint8_t> bad{0x00, 0x00, 0x08, 0x01, 0, 0, 0, 1, 7};
    try {
        parse_idx_images(bad);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.offset() == 0);
        CHECK(std::string(e.what()).find("offset 0") != std::string::npos);
    }
    CHECK_NOTHROW(parse_idx_labels(bad));

    IdxImages img{1, 2, 2, {1, 2, 3, 4}};
    auto bytes = encode_idx_images(img);
    bytes.pop_back();
    try {
        parse_idx_images(bytes);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.offset() == bytes.size());
    }

    const std::vector<std::uint8_t> short_header{0x00, 0x00, 0x08, 0x03, 0, 0};
    CHECK_THROWS_AS(parse_idx_images(short_header), FormatError);
    const std::vector<std::uint8_t> short_labels{0x00, 0x00, 0x08, 0x01, 0, 0, 0, 3, 1, 2};
    CHECK_THROWS_AS(parse_idx_labels(short_labels), FormatError);
}

TEST_CASE("IDX encode/parse round trip") {
    IdxImages img{3, 2, 3, {}};
    for (int i = 0; i < 18; ++i) {
        img.pixels.push_back(std::uint8_t(i * 14));
    }
    const IdxImages back = parse_idx_images(encode_idx_images(img));
    CHECK(back.count == 3);
    CHECK(back.rows == 2);
    CHECK(back.cols == 3);
    CHECK(back.pixels == img.pixels);
    const std::vector<std::uint8_t> labels{0, 9, 4};
    CHECK(parse_idx_labels(encode_idx_labels(labels)) == labels);
}

TEST_CASE("load_idx scales pixels and one-hot encodes labels") {
    const auto ip = temp_path("images.idx");
    const auto lp = temp_path("labels.idx");
    write_file_bytes(ip, encode_idx_images({2, 1, 2, {255, 0, 51, 102}}));
    const std::vector<std::uint8_t> labels{7, 0};
    write_file_bytes(lp, encode_idx_labels(labels));

    const LabeledData d = load_idx(ip, lp, 10);
    CHECK(d.size() == 2);
    CHECK(d.inputs(0, 0) == 1.0);
    CHECK(d.inputs(1, 0) == 0.0);
    CHECK(d.inputs(0, 1) == doctest::Approx(0.2));
    CHECK(d.labels == std::vector<std::size_t>{7, 0});
    for (std::size_t c = 0; c < 10; ++c) {
        CHECK(d.targets(c, 0) == (c == 7 ? 1.0 : 0.0));
    }

    try {
        load_idx(ip, lp, 5);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.offset() == 8);
    }
    const std::vector<std::uint8_t> three{1, 2, 3};
    write_file_bytes(lp, encode_idx_labels(three));
    CHECK_THROWS_AS(load_idx(ip, lp, 10), FormatError);
    CHECK_THROWS_AS(load_idx(temp_path("missing.idx"), lp, 10), IoError);
    std::filesystem::remove(ip);
    std::filesystem::remove(lp);
}

TEST_CASE("synthetic data is deterministic per seed") {
    DatasetSpec spec;
    spec.kind = DatasetKind::SyntheticTeacher;
    spec.teacher_hidden = {6};
    spec.train_size = 50;
    spec.test_size = 20;
    const auto a = make_synthetic(spec, 5, 3, 17);
    const auto b = make_synthetic(spec, 5, 3, 17);
    const auto c = make_synthetic(spec, 5, 3, 18);
    CHECK(a.train.inputs == b.train.inputs);
    CHECK(a.train.targets == b.train.targets);
    CHECK(a.test.targets == b.test.targets);
    CHECK_FALSE(a.train.inputs == c.train.inputs);
    CHECK_FALSE(a.classification);

    spec.kind = DatasetKind::SyntheticBlobs;
    const auto d = make_synthetic(spec, 5, 3, 17);
    const auto e = make_synthetic(spec, 5, 3, 17);
    CHECK(d.train.inputs == e.train.inputs);
    CHECK(d.train.labels == e.train.labels);
    CHECK(d.classification);
}

TEST_CASE("identity teacher returns its inputs") {
    std::vector<DenseLayer> layers;
    layers.emplace_back(Matrix::identity(4), Matrix(4, 1), Activation::Linear);
    Network teacher(std::move(layers));
    RngStream rng(61);
    const auto s = make_teacher_dataset(teacher, 30, 10, rng);
    CHECK(s.train.targets == s.train.inputs);
    CHECK(s.test.targets == s.test.inputs);
}

TEST_CASE("blobs are one-hot and well separated") {
    DatasetSpec spec;
    spec.train_size = 2000;
    spec.test_size = 100;
    const auto s = make_synthetic(spec, 64, 10, 3);
    CHECK(s.train.inputs.rows() == 64);
    CHECK(s.train.targets.rows() == 10);
    std::vector<std::size_t> counts(10, 0);
    for (std::size_t n = 0; n < s.train.size(); ++n) {
        double col_sum = 0.0;
        for (std::size_t c = 0; c < 10; ++c) {
            col_sum += s.train.targets(c, n);
        }
        REQUIRE(col_sum == 1.0);
        REQUIRE(s.train.targets(s.train.labels[n], n) == 1.0);
        ++counts[s.train.labels[n]];
    }
    for (std::size_t k : counts) {
        CHECK(k > 100);
    }
}

TEST_CASE("standardize uses training statistics") {
    DatasetSplits s;
    s.train.inputs = Matrix{{1, 3}, {5, 5}};
    s.test.inputs = Matrix{{2}, {7}};
    standardize(s);
    CHECK(s.train.inputs == Matrix{{-1, 1}, {0, 0}});
    CHECK(s.test.inputs(0, 0) == 0.0);
    CHECK(s.test.inputs(1, 0) == 2.0);
}

TEST_CASE("dataset kinds parse") {
    CHECK(parse_dataset_kind("synthetic_blobs") == DatasetKind::SyntheticBlobs);
    CHECK(parse_dataset_kind(to_string(DatasetKind::IdxFiles)) == DatasetKind::IdxFiles);
    CHECK_THROWS_AS(parse_dataset_kind("imagenet"), ConfigError);
    DatasetSpec spec;
    spec.kind = DatasetKind::IdxFiles;
    CHECK_THROWS_AS(make_synthetic(spec, 4, 2, 1), ConfigError);
}
