#include "fbw/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fbw/diagnostics.hpp"
#include "fbw/errors.hpp"
#include "fbw/feedback_rules.hpp"
#include "fbw/lr_schedule.hpp"

namespace fbw {

namespace {

// Sub-streams of the config seed.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kForwardInitStream = 2;
constexpr std::uint64_t kFeedbackInitStream = 3;
constexpr std::uint64_t kOrderStream = 4;
constexpr std::uint64_t kMirrorStream = 5;

Network build_network(const TrainConfig& config) {
    RngStream rng = RngStream(config.seed).derive(kForwardInitStream);
    Network net(config.widths, config.activation, config.output_activation, rng);
    RngStream feedback_rng = RngStream(config.seed).derive(kFeedbackInitStream);
    init_feedback(net, config.rule, feedback_rng, config.feedback_init_scale);
    return net;
}

TrainConfig validated(TrainConfig config) {
    config.validate();
    if (config.rule.kind == RuleKind::WeightMirror) {
        config.schedule.ramp_start = config.mirror_warmup_epochs;
    }
    return config;
}

std::size_t argmax_in_column(const Matrix& m, std::size_t col) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m.rows(); ++i) {
        if (m(i, col) > m(best, col)) {
            best = i;
        }
    }
    return best;
}

}  // namespace

Trainer::Trainer(TrainConfig config)
    : config_(validated(std::move(config))),
      data_(load_dataset(config_.dataset, config_.widths.front(), config_.widths.back(),
                         RngStream(config_.seed).derive(kDataStream).next_u64())),
      net_(build_network(config_)),
      opt_(net_, SgdSettings{config_.eta_W, config_.momentum, config_.lambda}),
      mirror_rng_(RngStream(config_.seed).derive(kMirrorStream)) {}

std::vector<std::size_t> Trainer::epoch_order(std::size_t epoch) const {
    std::vector<std::size_t> order(data_.train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream rng = RngStream(config_.seed).derive(kOrderStream).derive(epoch);
    // Fisher-Yates with our own index draws; std::shuffle is not portable.
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

Matrix Trainer::first_batch_inputs(std::size_t epoch) const {
    const auto order = epoch_order(epoch);
    const std::size_t count = std::min(config_.batch_size, order.size());
    return gather_columns(data_.train.inputs, std::span(order).first(count));
}

std::size_t Trainer::batches_per_epoch() const {
    return (data_.train.size() + config_.batch_size - 1) / config_.batch_size;
}

bool Trainer::in_mirror_warmup(std::size_t epoch) const {
    return config_.rule.kind == RuleKind::WeightMirror && epoch < config_.mirror_warmup_epochs;
}

double Trainer::current_eta_W() const { return lr_at_epoch(config_.schedule, epoch_, config_.eta_W); }

void Trainer::engaged_step(const Matrix& inputs, const Matrix& targets) {
    const FeedbackRule& rule = config_.rule;
    const bool baseline = rule.kind == RuleKind::WeightMirror && rule.wm.baseline_beta.has_value();
    const auto ys = baseline ? forward_baseline(net_, inputs, *rule.wm.baseline_beta) : forward(net_, inputs);
    const Matrix delta_L = output_error(ys.back(), targets);
    const double loss = 0.5 * frobenius_dot(delta_L, delta_L) / static_cast<double>(inputs.cols());
    if (!std::isfinite(loss)) {
        throw DivergenceError("training diverged: non-finite loss at epoch " + std::to_string(epoch_) + ", batch " +
                              std::to_string(batch_in_epoch_) + " (rule " + std::string(to_string(rule.kind)) +
                              ", eta_W " + std::to_string(current_eta_W()) + ")");
    }
    const FeedbackPath path = rule.kind == RuleKind::Backprop ? FeedbackPath::TrueTranspose : FeedbackPath::Learned;
    const auto deltas = backward_deltas(net_, delta_L, path);

    const double eta = current_eta_W();
    const SgdSettings forward_settings{eta, config_.momentum, config_.lambda};
    SgdSettings feedback_settings = forward_settings;
    if (rule.kind == RuleKind::KolenPollack) {
        if (rule.kp.eta_B) {
            feedback_settings.eta = lr_at_epoch(config_.schedule, epoch_, *rule.kp.eta_B);
        }
        feedback_settings.lambda = rule.kp.lambda.value_or(config_.lambda);
    }
    for (std::size_t l = net_.depth(); l >= 1; --l) {
        DenseLayer& layer = net_.layer(l);
        const Matrix& y_prev = layer.cached_input;
        update_forward(layer, deltas[l - 1], y_prev, forward_settings, opt_.layer(l));
        switch (rule.kind) {
            case RuleKind::Backprop:
                sync_transpose(layer);
                break;
            case RuleKind::SignSymmetry:
                sign_symmetry_sync(layer, rule.ss_magnitude);
                break;
            case RuleKind::KolenPollack:
                kp_update_feedback(layer, y_prev, deltas[l - 1], feedback_settings, opt_.layer(l));
                break;
            case RuleKind::FeedbackAlignment:
            case RuleKind::WeightMirror:
                break;
        }
    }
    if (rule.kind == RuleKind::WeightMirror) {
        mirror_sweep();
    }
}

MirrorSweepStats Trainer::mirror_sweep() {
    const MirrorParams& params = config_.rule.wm;
    const std::size_t batch = params.batch_size == 0 ? config_.batch_size : params.batch_size;
    return mirror_schedule(net_, params.schedule, batch, mirror_rng_, params);
}

MetricsRecord Trainer::evaluate(Split split, double eta_W) {
    const LabeledData& data = split == Split::Train ? data_.train : data_.test;
    MetricsRecord record;
    record.epoch = epoch_;
    record.split = split;
    record.eta_W = eta_W;

    const FeedbackRule& rule = config_.rule;
    const bool baseline = rule.kind == RuleKind::WeightMirror && rule.wm.baseline_beta.has_value();
    auto run = [&](const Matrix& x) {
        return baseline ? forward_baseline(net_, x, *rule.wm.baseline_beta) : forward(net_, x);
    };

    const Matrix prediction = run(data.inputs).back();
    record.loss = mse_loss(prediction, data.targets);
    std::size_t errors = 0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        if (data_.classification) {
            errors += argmax_in_column(prediction, n) != data.labels[n];
        } else {
            double se = 0.0;
            for (std::size_t i = 0; i < prediction.rows(); ++i) {
                const double d = prediction(i, n) - data.targets(i, n);
                se += d * d;
            }
            errors += se / static_cast<double>(prediction.rows()) > config_.teacher_error_threshold;
        }
    }
    record.error_rate = static_cast<double>(errors) / static_cast<double>(data.size());

    for (const auto& layer : net_.layers()) {
        try {
            record.matrix_angle_deg.emplace_back(matrix_angle(layer.W, layer.B));
        } catch (const DegenerateInputError&) {
            record.matrix_angle_deg.emplace_back(std::nullopt);
        }
    }

    const std::size_t probe = std::min(config_.probe_size, data.size());
    const Matrix probe_x = column_slice(data.inputs, 0, probe);
    const Matrix probe_t = column_slice(data.targets, 0, probe);
    const Matrix delta_L = output_error(run(probe_x).back(), probe_t);
    const auto learned = backward_deltas(net_, delta_L, FeedbackPath::Learned);
    const auto exact = backward_deltas(net_, delta_L, FeedbackPath::TrueTranspose);
    for (std::size_t i = 0; i < learned.size(); ++i) {
        try {
            record.delta_angle_deg.emplace_back(vector_angle_deg(learned[i], exact[i]));
        } catch (const DegenerateInputError&) {
            record.delta_angle_deg.emplace_back(std::nullopt);
        }
    }
    return record;
}

std::vector<MetricsRecord> Trainer::run_epoch() {
    if (epoch_ >= config_.epochs) {
        throw StateError("Trainer::run_epoch: all " + std::to_string(config_.epochs) + " epochs already ran");
    }
    double eta_record = 0.0;
    if (in_mirror_warmup(epoch_)) {
        for (batch_in_epoch_ = 0; batch_in_epoch_ < batches_per_epoch(); ++batch_in_epoch_) {
            mirror_sweep();
        }
    } else {
        eta_record = current_eta_W();
        const auto order = epoch_order(epoch_);
        const std::span<const std::size_t> all(order);
        batch_in_epoch_ = 0;
        for (std::size_t first = 0; first < order.size(); first += config_.batch_size, ++batch_in_epoch_) {
            const auto idx = all.subspan(first, std::min(config_.batch_size, order.size() - first));
            engaged_step(gather_columns(data_.train.inputs, idx), gather_columns(data_.train.targets, idx));
        }
    }
    std::vector<MetricsRecord> out{evaluate(Split::Train, eta_record), evaluate(Split::Test, eta_record)};
    records_.insert(records_.end(), out.begin(), out.end());
    ++epoch_;
    return out;
}

std::vector<MetricsRecord> Trainer::run() {
    while (epoch_ < config_.epochs) {
        run_epoch();
    }
    if (!config_.metrics_path.empty()) {
        emit_metrics(records_, net_.depth(), config_.metrics_path);
    }
    return records_;
}

TrainResult run_training(const TrainConfig& config) {
    Trainer trainer(config);
    TrainResult result;
    result.records = trainer.run();
    if (result.records.size() >= 2) {
        result.final_train = result.records[result.records.size() - 2];
        result.final_test = result.records.back();
    }
    return result;
}

}  // namespace fbw
