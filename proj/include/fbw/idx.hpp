#pragma once

// IDX files (the MNIST container format), big-endian throughout:
//
//   images: 0x00000803  count  rows  cols  then count*rows*cols unsigned bytes
//   labels: 0x00000801  count              then count unsigned bytes
//
// Pixels are scaled to [0, 1] by dividing by 255; labels become one-hot
// columns.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fbw/matrix.hpp"

namespace fbw {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image
};

/// Parse an in-memory image file. Throws FormatError with the byte offset of the problem.
IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
/// Parse an in-memory label file.
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_idx_images(const IdxImages& images);
std::vector<std::uint8_t> encode_idx_labels(std::span<const std::uint8_t> labels);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace fbw
