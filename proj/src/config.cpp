#include "fbw/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "fbw/errors.hpp"
#include "fbw/idx.hpp"

namespace fbw {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw ConfigError("config: invalid value '" + std::string(value) + "' for '" + std::string(key) +
                      "' (expected " + std::string(expected) + ")");
}

double to_real(std::string_view key, std::string_view value) {
    const std::string s(value);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) {
            return v;
        }
    } catch (const std::logic_error&) {
    }
    bad_value(key, value, "a finite real number");
}

std::uint64_t to_u64(std::string_view key, std::string_view value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
        bad_value(key, value, "a non-negative integer");
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_value(key, value, "true or false");
}

std::vector<std::size_t> to_list(std::string_view key, std::string_view value) {
    std::vector<std::size_t> out;
    while (!value.empty()) {
        const auto comma = value.find(',');
        const auto item = trim(value.substr(0, comma));
        out.push_back(static_cast<std::size_t>(to_u64(key, item)));
        if (comma == std::string_view::npos) {
            break;
        }
        value.remove_prefix(comma + 1);
    }
    return out;
}

std::string real_text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string list_text(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + std::to_string(v[i]);
    }
    return s;
}

template <typename T>
std::string opt_real_text(const std::optional<T>& v) {
    return v ? real_text(*v) : std::string();
}

struct KeyHandler {
    std::string key;
    std::function<void(TrainConfig&, std::string_view)> set;
    std::function<std::string(const TrainConfig&)> get;
};

const std::vector<KeyHandler>& handlers() {
    using C = TrainConfig;
    using V = std::string_view;
    static const std::vector<KeyHandler> table = {
        {"rule", [](C& c, V v) { c.rule.kind = parse_rule(v); },
         [](const C& c) { return std::string(to_string(c.rule.kind)); }},
        {"widths", [](C& c, V v) { c.widths = to_list("widths", v); }, [](const C& c) { return list_text(c.widths); }},
        {"activation", [](C& c, V v) { c.activation = parse_activation(v); },
         [](const C& c) { return std::string(to_string(c.activation)); }},
        {"output_activation", [](C& c, V v) { c.output_activation = parse_activation(v); },
         [](const C& c) { return std::string(to_string(c.output_activation)); }},
        {"eta_W", [](C& c, V v) { c.eta_W = to_real("eta_W", v); }, [](const C& c) { return real_text(c.eta_W); }},
        {"momentum", [](C& c, V v) { c.momentum = to_real("momentum", v); },
         [](const C& c) { return real_text(c.momentum); }},
        {"lambda", [](C& c, V v) { c.lambda = to_real("lambda", v); }, [](const C& c) { return real_text(c.lambda); }},
        {"batch_size", [](C& c, V v) { c.batch_size = to_u64("batch_size", v); },
         [](const C& c) { return std::to_string(c.batch_size); }},
        {"epochs", [](C& c, V v) { c.epochs = to_u64("epochs", v); }, [](const C& c) { return std::to_string(c.epochs); }},
        {"warmup_epochs", [](C& c, V v) { c.schedule.warmup_epochs = to_u64("warmup_epochs", v); },
         [](const C& c) { return std::to_string(c.schedule.warmup_epochs); }},
        {"decay_epochs", [](C& c, V v) { c.schedule.decay_epochs = to_list("decay_epochs", v); },
         [](const C& c) { return list_text(c.schedule.decay_epochs); }},
        {"decay_factor", [](C& c, V v) { c.schedule.decay_factor = to_real("decay_factor", v); },
         [](const C& c) { return real_text(c.schedule.decay_factor); }},
        {"mirror_warmup_epochs", [](C& c, V v) { c.mirror_warmup_epochs = to_u64("mirror_warmup_epochs", v); },
         [](const C& c) { return std::to_string(c.mirror_warmup_epochs); }},
        {"seed", [](C& c, V v) { c.seed = to_u64("seed", v); }, [](const C& c) { return std::to_string(c.seed); }},
        {"metrics_path", [](C& c, V v) { c.metrics_path = std::string(v); }, [](const C& c) { return c.metrics_path; }},
        {"feedback_init_scale",
         [](C& c, V v) {
             c.feedback_init_scale = v.empty() ? std::nullopt : std::optional(to_real("feedback_init_scale", v));
         },
         [](const C& c) { return opt_real_text(c.feedback_init_scale); }},
        {"probe_size", [](C& c, V v) { c.probe_size = to_u64("probe_size", v); },
         [](const C& c) { return std::to_string(c.probe_size); }},
        {"teacher_error_threshold", [](C& c, V v) { c.teacher_error_threshold = to_real("teacher_error_threshold", v); },
         [](const C& c) { return real_text(c.teacher_error_threshold); }},
        {"ss_magnitude", [](C& c, V v) { c.rule.ss_magnitude = parse_sign_magnitude(v); },
         [](const C& c) { return std::string(to_string(c.rule.ss_magnitude)); }},
        {"wm_eta_B", [](C& c, V v) { c.rule.wm.eta_B = to_real("wm_eta_B", v); },
         [](const C& c) { return real_text(c.rule.wm.eta_B); }},
        {"wm_lambda_WM", [](C& c, V v) { c.rule.wm.lambda_WM = to_real("wm_lambda_WM", v); },
         [](const C& c) { return real_text(c.rule.wm.lambda_WM); }},
        {"wm_noise_std", [](C& c, V v) { c.rule.wm.noise_std = to_real("wm_noise_std", v); },
         [](const C& c) { return real_text(c.rule.wm.noise_std); }},
        {"wm_bias_blocking", [](C& c, V v) { c.rule.wm.bias_blocking = to_bool("wm_bias_blocking", v); },
         [](const C& c) { return std::string(c.rule.wm.bias_blocking ? "true" : "false"); }},
        {"wm_baseline_beta",
         [](C& c, V v) {
             c.rule.wm.baseline_beta = v.empty() ? std::nullopt : std::optional(to_real("wm_baseline_beta", v));
         },
         [](const C& c) { return opt_real_text(c.rule.wm.baseline_beta); }},
        {"wm_baseline_centering", [](C& c, V v) { c.rule.wm.baseline_centering = parse_baseline_centering(v); },
         [](const C& c) { return std::string(to_string(c.rule.wm.baseline_centering)); }},
        {"wm_schedule", [](C& c, V v) { c.rule.wm.schedule = parse_mirror_schedule(v); },
         [](const C& c) { return std::string(to_string(c.rule.wm.schedule)); }},
        {"mirror_batch_size", [](C& c, V v) { c.rule.wm.batch_size = to_u64("mirror_batch_size", v); },
         [](const C& c) { return std::to_string(c.rule.wm.batch_size); }},
        {"kp_eta_B",
         [](C& c, V v) { c.rule.kp.eta_B = v.empty() ? std::nullopt : std::optional(to_real("kp_eta_B", v)); },
         [](const C& c) { return opt_real_text(c.rule.kp.eta_B); }},
        {"kp_lambda",
         [](C& c, V v) { c.rule.kp.lambda = v.empty() ? std::nullopt : std::optional(to_real("kp_lambda", v)); },
         [](const C& c) { return opt_real_text(c.rule.kp.lambda); }},
        {"dataset_kind", [](C& c, V v) { c.dataset.kind = parse_dataset_kind(v); },
         [](const C& c) { return std::string(to_string(c.dataset.kind)); }},
        {"train_size", [](C& c, V v) { c.dataset.train_size = to_u64("train_size", v); },
         [](const C& c) { return std::to_string(c.dataset.train_size); }},
        {"test_size", [](C& c, V v) { c.dataset.test_size = to_u64("test_size", v); },
         [](const C& c) { return std::to_string(c.dataset.test_size); }},
        {"normalize", [](C& c, V v) { c.dataset.normalize = to_bool("normalize", v); },
         [](const C& c) { return std::string(c.dataset.normalize ? "true" : "false"); }},
        {"teacher_hidden", [](C& c, V v) { c.dataset.teacher_hidden = to_list("teacher_hidden", v); },
         [](const C& c) { return list_text(c.dataset.teacher_hidden); }},
        {"teacher_activation", [](C& c, V v) { c.dataset.teacher_activation = parse_activation(v); },
         [](const C& c) { return std::string(to_string(c.dataset.teacher_activation)); }},
        {"blobs_separation", [](C& c, V v) { c.dataset.blobs_separation = to_real("blobs_separation", v); },
         [](const C& c) { return real_text(c.dataset.blobs_separation); }},
        {"blobs_noise_std", [](C& c, V v) { c.dataset.blobs_noise_std = to_real("blobs_noise_std", v); },
         [](const C& c) { return real_text(c.dataset.blobs_noise_std); }},
        {"train_images", [](C& c, V v) { c.dataset.train_images = std::string(v); },
         [](const C& c) { return c.dataset.train_images.string(); }},
        {"train_labels", [](C& c, V v) { c.dataset.train_labels = std::string(v); },
         [](const C& c) { return c.dataset.train_labels.string(); }},
        {"test_images", [](C& c, V v) { c.dataset.test_images = std::string(v); },
         [](const C& c) { return c.dataset.test_images.string(); }},
        {"test_labels", [](C& c, V v) { c.dataset.test_labels = std::string(v); },
         [](const C& c) { return c.dataset.test_labels.string(); }},
    };
    return table;
}

}  // namespace

void TrainConfig::validate() const {
    rule.validate();
    if (widths.size() < 2) {
        throw ConfigError("config: widths needs at least an input and an output size");
    }
    for (std::size_t w : widths) {
        if (w == 0) {
            throw ConfigError("config: widths must be positive");
        }
    }
    if (!(eta_W > 0.0)) {
        throw ConfigError("config: eta_W must be > 0");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw ConfigError("config: momentum must lie in [0, 1)");
    }
    if (!(lambda >= 0.0 && lambda < 1.0)) {
        throw ConfigError("config: lambda must lie in [0, 1)");
    }
    if (batch_size == 0) {
        throw ConfigError("config: batch_size must be positive");
    }
    if (!(schedule.decay_factor > 0.0 && schedule.decay_factor < 1.0)) {
        throw ConfigError("config: decay_factor must lie in (0, 1)");
    }
    if (rule.kind == RuleKind::WeightMirror) {
        const std::size_t mirror_batch = rule.wm.batch_size == 0 ? batch_size : rule.wm.batch_size;
        if (mirror_batch < 2) {
            throw ConfigError("config: weight mirrors need a mirror batch of at least 2 (batch-mean subtraction)");
        }
    } else if (mirror_warmup_epochs > 0) {
        throw ConfigError("config: mirror_warmup_epochs is only meaningful for rule wm");
    }
    if (mirror_warmup_epochs > epochs) {
        throw ConfigError("config: mirror_warmup_epochs exceeds epochs");
    }
    if (feedback_init_scale && !(*feedback_init_scale >= 0.0)) {
        throw ConfigError("config: feedback_init_scale must be >= 0");
    }
    if (probe_size == 0) {
        throw ConfigError("config: probe_size must be positive");
    }
    if (dataset.kind == DatasetKind::IdxFiles &&
        (dataset.train_images.empty() || dataset.train_labels.empty() || dataset.test_images.empty() ||
         dataset.test_labels.empty())) {
        throw ConfigError("config: idx_files needs train_images, train_labels, test_images and test_labels");
    }
    if (dataset.kind != DatasetKind::IdxFiles && (dataset.train_size == 0 || dataset.test_size == 0)) {
        throw ConfigError("config: train_size and test_size must be positive");
    }
}

void apply_config_value(TrainConfig& config, std::string_view key, std::string_view value) {
    for (const auto& h : handlers()) {
        if (h.key == key) {
            h.set(config, trim(value));
            return;
        }
    }
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

TrainConfig parse_config(std::string_view text, TrainConfig base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto line = trim(text.substr(0, nl));
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) + " is not of the form 'key = value'");
        }
        apply_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
    const auto bytes = read_file_bytes(path);
    return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), std::move(base));
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& h : handlers()) {
            k.push_back(h.key);
        }
        return k;
    }();
    return keys;
}

std::string format_config(const TrainConfig& config) {
    std::string out;
    for (const auto& h : handlers()) {
        out += h.key + " = " + h.get(config) + "\n";
    }
    return out;
}

}  // namespace fbw
