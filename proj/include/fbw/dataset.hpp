#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fbw/activation.hpp"
#include "fbw/matrix.hpp"
#include "fbw/network.hpp"

namespace fbw {

class RngStream;

/// Examples stored one per column. `labels` is empty for regression data.
struct LabeledData {
    Matrix inputs;
    Matrix targets;
    std::vector<std::size_t> labels;

    std::size_t size() const noexcept { return inputs.cols(); }
};

struct DatasetSplits {
    LabeledData train;
    LabeledData test;
    bool classification = false;
};

enum class DatasetKind { SyntheticTeacher, SyntheticBlobs, IdxFiles };

std::string_view to_string(DatasetKind kind) noexcept;
DatasetKind parse_dataset_kind(std::string_view name);

struct DatasetSpec {
    DatasetKind kind = DatasetKind::SyntheticBlobs;
    std::size_t train_size = 1000;
    std::size_t test_size = 500;
    /// Standardise every input dimension with the training split's mean and std.
    bool normalize = true;

    // synthetic_teacher: Gaussian inputs labelled by a random network.
    std::vector<std::size_t> teacher_hidden;
    Activation teacher_activation = Activation::Tanh;

    // synthetic_blobs: one Gaussian cluster per class.
    double blobs_separation = 10.0;  // expected distance between centres, in noise std units
    double blobs_noise_std = 1.0;

    // idx_files
    std::filesystem::path train_images;
    std::filesystem::path train_labels;
    std::filesystem::path test_images;
    std::filesystem::path test_labels;
};

/**
 * Reads an IDX image/label pair: pixels scaled to [0, 1], one image per
 * column, labels one-hot over `num_classes`. Throws FormatError (with byte
 * offset) on bad magic, truncation, count mismatch or out-of-range labels.
 */
LabeledData load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                     std::size_t num_classes);

/// Inputs ~ N(0, I), targets = teacher(inputs). Draws train then test columns from `rng`.
DatasetSplits make_teacher_dataset(Network& teacher, std::size_t train_size, std::size_t test_size,
                                   RngStream& rng);

/**
 * Synthetic train/test data for the synthetic dataset kinds, deterministic in `seed`.
 * Teacher mode builds a random teacher with widths {input_dim, teacher_hidden..., output_dim}
 * (linear output). Blobs mode places output_dim class centres at
 * separation / sqrt(2) * noise_std along random unit directions, so
 * centres are on average `separation` noise standard deviations apart.
 */
DatasetSplits make_synthetic(const DatasetSpec& spec, std::size_t input_dim, std::size_t output_dim,
                             std::uint64_t seed);

/// Resolve any DatasetSpec, including IDX files, and apply normalisation.
DatasetSplits load_dataset(const DatasetSpec& spec, std::size_t input_dim, std::size_t output_dim,
                           std::uint64_t seed);

/// In place: inputs of both splits standardised with the train split's per-row mean and std.
void standardize(DatasetSplits& splits);

}  // namespace fbw
