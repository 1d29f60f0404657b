#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fbw {

enum class Split { Train, Test };

std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view name);

/**
 * One CSV row. Angles are per layer (index l - 1 is layer l); an angle is
 * absent when it is undefined (zero-norm feedback or error signal) and is
 * written as an empty field.
 */
struct MetricsRecord {
    std::size_t epoch = 0;
    Split split = Split::Train;
    double loss = 0.0;
    double error_rate = 0.0;
    double eta_W = 0.0;
    std::vector<std::optional<double>> matrix_angle_deg;
    std::vector<std::optional<double>> delta_angle_deg;
};

/// epoch,split,loss,error_rate,eta_W,angle_W_B_l1..lL,angle_delta_l1..lL
std::string metrics_header(std::size_t num_layers);

/// One line without the trailing newline; reals use 9 significant digits.
std::string format_metrics_row(const MetricsRecord& record);

/// Header plus one row per record. Throws DimensionError if a record's angle
/// count differs from num_layers, IoError on write failure.
void emit_metrics(const std::vector<MetricsRecord>& records, std::size_t num_layers,
                  const std::filesystem::path& path);

/// Parses a file written by emit_metrics. Throws FormatError on schema violations.
std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path);

}  // namespace fbw
