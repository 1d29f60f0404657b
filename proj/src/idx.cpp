#include "fbw/idx.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <iterator>

#include "fbw/errors.hpp"

namespace fbw {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset, const char* field) {
    if (offset + 4 > bytes.size()) {
        throw FormatError(std::string("IDX: file ends inside the ") + field + " field", bytes.size());
    }
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void check_magic(std::uint32_t magic, std::uint32_t expected) {
    if (magic != expected) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "IDX: bad magic number 0x%08x, expected 0x%08x", magic, expected);
        throw FormatError(buf, 0);
    }
}

}  // namespace

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes) {
    check_magic(read_be32(bytes, 0, "magic"), kIdxImageMagic);
    IdxImages images;
    images.count = read_be32(bytes, 4, "image count");
    images.rows = read_be32(bytes, 8, "row count");
    images.cols = read_be32(bytes, 12, "column count");
    const std::size_t header = 16;
    const std::size_t per_image = images.rows * images.cols;
    if (per_image != 0 && images.count > std::numeric_limits<std::size_t>::max() / per_image) {
        throw FormatError("IDX: image dimensions overflow", 4);
    }
    const std::size_t expected = images.count * per_image;
    if (bytes.size() - header < expected) {
        throw FormatError("IDX: truncated image payload, expected " + std::to_string(expected) +
                              " pixel bytes but found " + std::to_string(bytes.size() - header),
                          bytes.size());
    }
    images.pixels.assign(bytes.begin() + header, bytes.begin() + static_cast<std::ptrdiff_t>(header + expected));
    return images;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
    check_magic(read_be32(bytes, 0, "magic"), kIdxLabelMagic);
    const std::size_t count = read_be32(bytes, 4, "label count");
    const std::size_t header = 8;
    if (bytes.size() - header < count) {
        throw FormatError("IDX: truncated label payload, expected " + std::to_string(count) +
                              " labels but found " + std::to_string(bytes.size() - header),
                          bytes.size());
    }
    return {bytes.begin() + header, bytes.begin() + static_cast<std::ptrdiff_t>(header + count)};
}

std::vector<std::uint8_t> encode_idx_images(const IdxImages& images) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + images.pixels.size());
    append_be32(out, kIdxImageMagic);
    append_be32(out, static_cast<std::uint32_t>(images.count));
    append_be32(out, static_cast<std::uint32_t>(images.rows));
    append_be32(out, static_cast<std::uint32_t>(images.cols));
    out.insert(out.end(), images.pixels.begin(), images.pixels.end());
    return out;
}

std::vector<std::uint8_t> encode_idx_labels(std::span<const std::uint8_t> labels) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + labels.size());
    append_be32(out, kIdxLabelMagic);
    append_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

}  // namespace fbw
