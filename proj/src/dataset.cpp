#include "fbw/dataset.hpp"

#include <cmath>

#include "fbw/errors.hpp"
#include "fbw/idx.hpp"
#include "fbw/rng.hpp"

namespace fbw {

namespace {

// Sub-streams of the dataset seed.
constexpr std::uint64_t kTeacherWeights = 1;
constexpr std::uint64_t kTeacherInputs = 2;
constexpr std::uint64_t kBlobCentres = 3;
constexpr std::uint64_t kBlobSamples = 4;

LabeledData blob_split(const std::vector<Matrix>& centres, std::size_t count, double noise_std, RngStream& rng) {
    const std::size_t dim = centres.front().rows();
    const std::size_t classes = centres.size();
    LabeledData data;
    data.inputs = Matrix(dim, count);
    data.targets = Matrix(classes, count);
    data.labels.resize(count);
    for (std::size_t n = 0; n < count; ++n) {
        const std::size_t label = rng.uniform_index(classes);
        data.labels[n] = label;
        data.targets(label, n) = 1.0;
        for (std::size_t i = 0; i < dim; ++i) {
            data.inputs(i, n) = centres[label](i, 0) + noise_std * rng.normal();
        }
    }
    return data;
}

}  // namespace

std::string_view to_string(DatasetKind kind) noexcept {
    switch (kind) {
        case DatasetKind::SyntheticTeacher:
            return "synthetic_teacher";
        case DatasetKind::SyntheticBlobs:
            return "synthetic_blobs";
        case DatasetKind::IdxFiles:
            return "idx_files";
    }
    return "synthetic_blobs";
}

DatasetKind parse_dataset_kind(std::string_view name) {
    if (name == "synthetic_teacher") return DatasetKind::SyntheticTeacher;
    if (name == "synthetic_blobs") return DatasetKind::SyntheticBlobs;
    if (name == "idx_files") return DatasetKind::IdxFiles;
    throw ConfigError("unknown dataset kind '" + std::string(name) +
                      "' (expected synthetic_teacher, synthetic_blobs or idx_files)");
}

LabeledData load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                     std::size_t num_classes) {
    const IdxImages images = parse_idx_images(read_file_bytes(images_path));
    const std::vector<std::uint8_t> labels = parse_idx_labels(read_file_bytes(labels_path));
    if (labels.size() != images.count) {
        throw FormatError("IDX: '" + labels_path.string() + "' holds " + std::to_string(labels.size()) +
                              " labels but '" + images_path.string() + "' holds " +
                              std::to_string(images.count) + " images",
                          4);
    }
    const std::size_t dim = images.rows * images.cols;
    LabeledData data;
    data.inputs = Matrix(dim, images.count);
    data.targets = Matrix(num_classes, images.count);
    data.labels.resize(images.count);
    for (std::size_t n = 0; n < images.count; ++n) {
        if (labels[n] >= num_classes) {
            throw FormatError("IDX: label " + std::to_string(labels[n]) + " in '" + labels_path.string() +
                                  "' is out of range for " + std::to_string(num_classes) + " classes",
                              8 + n);
        }
        data.labels[n] = labels[n];
        data.targets(labels[n], n) = 1.0;
        for (std::size_t i = 0; i < dim; ++i) {
            data.inputs(i, n) = static_cast<double>(images.pixels[n * dim + i]) / 255.0;
        }
    }
    return data;
}

DatasetSplits make_teacher_dataset(Network& teacher, std::size_t train_size, std::size_t test_size,
                                   RngStream& rng) {
    const std::size_t dim = teacher.widths().front();
    DatasetSplits splits;
    splits.classification = false;
    auto make = [&](std::size_t count) {
        LabeledData data;
        data.inputs = gaussian_matrix(dim, count, 0.0, 1.0, rng);
        data.targets = forward(teacher, data.inputs).back();
        return data;
    };
    splits.train = make(train_size);
    splits.test = make(test_size);
    teacher.clear_caches();
    return splits;
}

DatasetSplits make_synthetic(const DatasetSpec& spec, std::size_t input_dim, std::size_t output_dim,
                             std::uint64_t seed) {
    if (spec.train_size == 0 || spec.test_size == 0) {
        throw ConfigError("dataset: train_size and test_size must be positive");
    }
    const RngStream root(seed);
    switch (spec.kind) {
        case DatasetKind::SyntheticTeacher: {
            std::vector<std::size_t> widths{input_dim};
            widths.insert(widths.end(), spec.teacher_hidden.begin(), spec.teacher_hidden.end());
            widths.push_back(output_dim);
            RngStream weights = root.derive(kTeacherWeights);
            Network teacher(widths, spec.teacher_activation, Activation::Linear, weights);
            RngStream inputs = root.derive(kTeacherInputs);
            return make_teacher_dataset(teacher, spec.train_size, spec.test_size, inputs);
        }
        case DatasetKind::SyntheticBlobs: {
            if (output_dim < 2) {
                throw ConfigError("dataset: blobs need at least two classes");
            }
            if (!(spec.blobs_noise_std > 0.0) || !(spec.blobs_separation >= 0.0)) {
                throw ConfigError("dataset: blobs need noise_std > 0 and separation >= 0");
            }
            RngStream centre_rng = root.derive(kBlobCentres);
            std::vector<Matrix> centres;
            const double radius = spec.blobs_separation * spec.blobs_noise_std / std::sqrt(2.0);
            for (std::size_t c = 0; c < output_dim; ++c) {
                Matrix direction = gaussian_matrix(input_dim, 1, 0.0, 1.0, centre_rng);
                direction *= radius / frobenius_norm(direction);
                centres.push_back(std::move(direction));
            }
            RngStream sample_rng = root.derive(kBlobSamples);
            DatasetSplits splits;
            splits.classification = true;
            splits.train = blob_split(centres, spec.train_size, spec.blobs_noise_std, sample_rng);
            splits.test = blob_split(centres, spec.test_size, spec.blobs_noise_std, sample_rng);
            return splits;
        }
        case DatasetKind::IdxFiles:
            break;
    }
    throw ConfigError("make_synthetic: dataset kind '" + std::string(to_string(spec.kind)) + "' is not synthetic");
}

void standardize(DatasetSplits& splits) {
    const Matrix mean = row_means(splits.train.inputs);
    const std::size_t n = splits.train.inputs.cols();
    for (std::size_t i = 0; i < mean.rows(); ++i) {
        double var = 0.0;
        for (double x : splits.train.inputs.row(i)) {
            var += (x - mean(i, 0)) * (x - mean(i, 0));
        }
        var /= static_cast<double>(n);
        const double scale = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
        for (LabeledData* split : {&splits.train, &splits.test}) {
            for (double& x : split->inputs.row(i)) {
                x = (x - mean(i, 0)) * scale;
            }
        }
    }
}

DatasetSplits load_dataset(const DatasetSpec& spec, std::size_t input_dim, std::size_t output_dim,
                           std::uint64_t seed) {
    DatasetSplits splits;
    if (spec.kind == DatasetKind::IdxFiles) {
        splits.classification = true;
        splits.train = load_idx(spec.train_images, spec.train_labels, output_dim);
        splits.test = load_idx(spec.test_images, spec.test_labels, output_dim);
        if (splits.train.inputs.rows() != input_dim || splits.test.inputs.rows() != input_dim) {
            throw ConfigError("dataset: IDX images have " + std::to_string(splits.train.inputs.rows()) +
                              " pixels but the network input width is " + std::to_string(input_dim));
        }
    } else {
        splits = make_synthetic(spec, input_dim, output_dim, seed);
    }
    if (splits.train.size() == 0 || splits.test.size() == 0) {
        throw ConfigError("dataset: both splits must be non-empty");
    }
    if (spec.normalize) {
        standardize(splits);
    }
    return splits;
}

}  // namespace fbw
