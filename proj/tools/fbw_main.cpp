// fbw: command-line harness for training with learned feedback weights and
// for running the built-in verification checks.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbw/checks.hpp"
#include "fbw/config.hpp"
#include "fbw/diagnostics.hpp"
#include "fbw/errors.hpp"
#include "fbw/trainer.hpp"

namespace {

std::string angle_list(const std::vector<std::optional<double>>& angles) {
    std::string out;
    for (const auto& a : angles) {
        char buf[32];
        if (a) {
            std::snprintf(buf, sizeof buf, "%s%.2f", out.empty() ? "" : " ", *a);
        } else {
            std::snprintf(buf, sizeof buf, "%s-", out.empty() ? "" : " ");
        }
        out += buf;
    }
    return out;
}

int run_train(const std::string& config_path, const std::optional<std::string>& rule,
              const std::optional<std::uint64_t>& seed, const std::optional<std::size_t>& epochs,
              const std::optional<std::string>& out, const std::vector<std::string>& overrides, bool quiet) {
    fbw::TrainConfig config = config_path.empty() ? fbw::TrainConfig{} : fbw::load_config(config_path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw fbw::ConfigError("--set expects key=value, got '" + kv + "'");
        }
        fbw::apply_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (rule) fbw::apply_config_value(config, "rule", *rule);
    if (seed) config.seed = *seed;
    if (epochs) config.epochs = *epochs;
    if (out) config.metrics_path = *out;

    fbw::Trainer trainer(config);
    while (trainer.epochs_done() < trainer.config().epochs) {
        const auto rows = trainer.run_epoch();
        if (!quiet) {
            const auto& train = rows[0];
            const auto& test = rows[1];
            std::printf("epoch %3zu  eta_W %.3g  train loss %.6g err %.4f  test loss %.6g err %.4f  "
                        "W/B angles [%s]  delta angles [%s]\n",
                        test.epoch, test.eta_W, train.loss, train.error_rate, test.loss, test.error_rate,
                        angle_list(test.matrix_angle_deg).c_str(), angle_list(test.delta_angle_deg).c_str());
        }
    }
    if (!trainer.config().metrics_path.empty()) {
        fbw::emit_metrics(trainer.records(), trainer.network().depth(), trainer.config().metrics_path);
        if (!quiet) {
            std::printf("metrics written to %s\n", trainer.config().metrics_path.c_str());
        }
    }
    return 0;
}

int run_mirror_check(std::uint64_t seed, std::size_t samples, std::size_t batch) {
    fbw::MirrorExpectationSetup setup;
    setup.seed = seed;
    setup.samples = samples;
    setup.batch_size = batch;
    const auto r = fbw::run_mirror_expectation(setup);
    const bool cos_ok = r.cosine >= 0.999;
    const bool norm_ok = std::abs(r.norm_ratio - 1.0) <= 0.02;
    std::printf("mirror expectation: %zux%zu linear layer, bias blocking, sigma %.3g, lambda_WM 0, %zu samples\n",
                setup.n_out, setup.n_in, setup.noise_std, r.samples);
    std::printf("  cosine(mean dB / eta_B, W^T)          = %.6f  (>= 0.999: %s)\n", r.cosine, cos_ok ? "ok" : "FAIL");
    std::printf("  ||mean dB / eta_B|| / (sigma^2 ||W||) = %.6f  (within 2%%: %s)\n", r.norm_ratio,
                norm_ok ? "ok" : "FAIL");
    std::printf("%s\n", cos_ok && norm_ok ? "PASS" : "FAIL");
    return cos_ok && norm_ok ? 0 : 1;
}

int run_kp_check(std::uint64_t seed, std::size_t steps, double lambda) {
    fbw::KpContractionSetup setup;
    setup.seed = seed;
    setup.steps = steps;
    setup.lambda = lambda;
    const auto run = fbw::run_kp_contraction(setup);
    bool ok = true;
    std::printf("kolen-pollack contraction: widths 20-15-10, lambda %.3g, eta_B = eta_W, momentum 0, %zu steps\n",
                lambda, steps);
    for (std::size_t l = 0; l < run.per_layer.size(); ++l) {
        const auto& rep = run.per_layer[l];
        std::printf("  layer %zu: ||W-B^T|| %.3e -> %.3e, max |ratio/(1-lambda) - 1| = %.3e over %zu steps  %s\n",
                    l + 1, run.history[l].front(), run.history[l].back(), rep.max_deviation, rep.steps_checked,
                    rep.passed ? "ok" : "FAIL");
        ok = ok && rep.passed;
    }
    std::printf("  max cumulative deviation from (1-lambda)^t: %.3e\n", run.max_cumulative_deviation);
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

int run_flops(const std::string& rule, std::uint64_t n_l, std::uint64_t n_next) {
    auto print = [&](fbw::RuleKind kind) {
        const auto est = fbw::flops_estimate(kind, n_l, n_next);
        std::printf("%s: %llu flops per example, %llu noise draws (n_l=%llu, n_next=%llu)\n",
                    std::string(fbw::to_string(kind)).c_str(), static_cast<unsigned long long>(est.flops),
                    static_cast<unsigned long long>(est.noise_draws), static_cast<unsigned long long>(n_l),
                    static_cast<unsigned long long>(n_next));
    };
    if (rule == "kp" || rule == "both") print(fbw::RuleKind::KolenPollack);
    if (rule == "wm" || rule == "both") print(fbw::RuleKind::WeightMirror);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fbw - dense networks trained with learned or fixed feedback weights"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "Train a network and write per-epoch metrics");
    std::string config_path;
    std::optional<std::string> rule;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
    std::optional<std::string> out;
    std::vector<std::string> overrides;
    bool quiet = false;
    train->add_option("--config", config_path, "Config file (key = value per line)")->check(CLI::ExistingFile);
    train->add_option("--rule", rule, "Feedback rule: bp, fa, ss, wm or kp");
    train->add_option("--seed", seed, "Random seed");
    train->add_option("--epochs", epochs, "Number of epochs");
    train->add_option("--out", out, "CSV metrics path");
    train->add_option("--set", overrides, "Override any config key, e.g. --set eta_W=0.1");
    train->add_flag("--quiet", quiet, "Do not print per-epoch progress");

    auto* mirror = app.add_subcommand("mirror-check", "Monte-Carlo check of the expected mirror update");
    std::uint64_t mirror_seed = 1;
    std::size_t samples = 1'000'000;
    std::size_t mirror_batch = 1000;
    mirror->add_option("--seed", mirror_seed, "Random seed");
    mirror->add_option("--samples", samples, "Number of noise samples");
    mirror->add_option("--batch", mirror_batch, "Mirror batch size");

    auto* kp = app.add_subcommand("kp-check", "Check the exact Kolen-Pollack contraction of W - B^T");
    std::uint64_t kp_seed = 1;
    std::size_t steps = 100;
    double lambda = 0.1;
    kp->add_option("--seed", kp_seed, "Random seed");
    kp->add_option("--steps", steps, "Training steps");
    kp->add_option("--lambda", lambda, "Shared weight decay")->check(CLI::Range(0.0, 1.0));

    auto* flops = app.add_subcommand("flops", "Per-example cost of learning B between two layers");
    std::string flops_rule = "both";
    std::uint64_t n_l = 3;
    std::uint64_t n_next = 2;
    flops->add_option("--rule", flops_rule, "kp, wm or both")->check(CLI::IsMember({"kp", "wm", "both"}));
    flops->add_option("--n-l", n_l, "Width of the lower layer")->check(CLI::PositiveNumber);
    flops->add_option("--n-next", n_next, "Width of the upper layer")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) return run_train(config_path, rule, seed, epochs, out, overrides, quiet);
        if (*mirror) return run_mirror_check(mirror_seed, samples, mirror_batch);
        if (*kp) return run_kp_check(kp_seed, steps, lambda);
        if (*flops) return run_flops(flops_rule, n_l, n_next);
    } catch (const fbw::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
