#include "fbw/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fbw/errors.hpp"

namespace fbw {

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_real(const std::string& text, std::size_t offset) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw FormatError("metrics: trailing characters in number '" + text + "'", offset);
        }
        return v;
    } catch (const std::logic_error&) {
        throw FormatError("metrics: cannot parse number '" + text + "'", offset);
    }
}

}  // namespace

std::string_view to_string(Split split) noexcept { return split == Split::Train ? "train" : "test"; }

Split parse_split(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "test") return Split::Test;
    throw ConfigError("unknown split '" + std::string(name) + "'");
}

std::string metrics_header(std::size_t num_layers) {
    std::string header = "epoch,split,loss,error_rate,eta_W";
    for (std::size_t l = 1; l <= num_layers; ++l) {
        header += ",angle_W_B_l" + std::to_string(l);
    }
    for (std::size_t l = 1; l <= num_layers; ++l) {
        header += ",angle_delta_l" + std::to_string(l);
    }
    return header;
}

std::string format_metrics_row(const MetricsRecord& r) {
    std::string line = std::to_string(r.epoch) + "," + std::string(to_string(r.split)) + "," + format_real(r.loss) +
                       "," + format_real(r.error_rate) + "," + format_real(r.eta_W);
    for (const auto* angles : {&r.matrix_angle_deg, &r.delta_angle_deg}) {
        for (const auto& a : *angles) {
            line += ",";
            if (a) {
                line += format_real(*a);
            }
        }
    }
    return line;
}

void emit_metrics(const std::vector<MetricsRecord>& records, std::size_t num_layers,
                  const std::filesystem::path& path) {
    for (const auto& r : records) {
        if (r.matrix_angle_deg.size() != num_layers || r.delta_angle_deg.size() != num_layers) {
            throw DimensionError("emit_metrics: record for epoch " + std::to_string(r.epoch) +
                                 " does not have " + std::to_string(num_layers) + " angle columns");
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("emit_metrics: cannot open '" + path.string() + "' for writing");
    }
    out << metrics_header(num_layers) << '\n';
    for (const auto& r : records) {
        out << format_metrics_row(r) << '\n';
    }
    out.flush();
    if (!out) {
        throw IoError("emit_metrics: write to '" + path.string() + "' failed");
    }
}

std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("read_metrics: cannot open '" + path.string() + "'");
    }
    std::string line;
    std::size_t offset = 0;
    if (!std::getline(in, line)) {
        throw FormatError("metrics: missing header", 0);
    }
    const auto header = split_fields(line);
    if (header.size() < 5 || (header.size() - 5) % 2 != 0) {
        throw FormatError("metrics: malformed header", 0);
    }
    const std::size_t layers = (header.size() - 5) / 2;
    if (line != metrics_header(layers)) {
        throw FormatError("metrics: header does not match the expected schema", 0);
    }
    offset += line.size() + 1;
    std::vector<MetricsRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) {
            offset += 1;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw FormatError("metrics: row has " + std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(header.size()),
                              offset);
        }
        MetricsRecord r;
        r.epoch = static_cast<std::size_t>(parse_real(fields[0], offset));
        try {
            r.split = parse_split(fields[1]);
        } catch (const ConfigError&) {
            throw FormatError("metrics: unknown split '" + fields[1] + "'", offset);
        }
        r.loss = parse_real(fields[2], offset);
        r.error_rate = parse_real(fields[3], offset);
        r.eta_W = parse_real(fields[4], offset);
        for (std::size_t l = 0; l < layers; ++l) {
            const auto& m = fields[5 + l];
            const auto& d = fields[5 + layers + l];
            r.matrix_angle_deg.push_back(m.empty() ? std::nullopt : std::optional(parse_real(m, offset)));
            r.delta_angle_deg.push_back(d.empty() ? std::nullopt : std::optional(parse_real(d, offset)));
        }
        records.push_back(std::move(r));
        offset += line.size() + 1;
    }
    return records;
}

}  // namespace fbw
