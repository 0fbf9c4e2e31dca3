#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "matrixtx/runner.hpp"
#include "matrixtx/scenario.hpp"
#include "matrixtx/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;

struct CommonArgs {
    std::string config;
    std::string output;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* c = cmd->add_option("--config", args.config, "scenario config file (JSON)");
    if (config_required) c->required();
    cmd->add_option("--output", args.output, "output CSV path (overrides config)");
    cmd->add_option("--seed", args.seed, "PBS seed override")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--threads", args.threads, "worker threads (0 = hardware)");
}

int run_experiment(const CommonArgs& args,
                   void (*fn)(const matrixtx::ScenarioConfig&,
                              const matrixtx::RunOptions&)) {
    try {
        const auto cfg = matrixtx::ScenarioConfig::load(args.config);
        matrixtx::RunOptions opts;
        opts.output_override = args.output;
        if (args.seed_set) opts.seed = args.seed;
        opts.threads = args.threads;
        fn(cfg, opts);
        return kExitOk;
    } catch (const matrixtx::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidationFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "matrixtx: diffusive channel models for spherical matrix-type drug "
        "carriers (release models, moving-boundary solver, absorbing-receiver "
        "responses, particle-based simulation)"};
    app.require_subcommand(1);

    CommonArgs release_args, channel_args, rate_args, validate_args;

    auto* release = app.add_subcommand(
        "release", "release curves per model, written as CSV");
    add_common(release, release_args, true);

    auto* channel = app.add_subcommand(
        "channel", "absorbed-molecule curves at the receiver, written as CSV");
    add_common(channel, channel_args, true);

    auto* rate = app.add_subcommand(
        "rate", "absorption rates on a uniform grid, written as CSV");
    add_common(rate, rate_args, true);

    auto* validate = app.add_subcommand(
        "validate", "run the built-in cross-validation suite (C1..C10)");
    add_common(validate, validate_args, false);

    CLI11_PARSE(app, argc, argv);

    if (release->parsed()) return run_experiment(release_args, matrixtx::run_release);
    if (channel->parsed()) return run_experiment(channel_args, matrixtx::run_channel);
    if (rate->parsed()) return run_experiment(rate_args, matrixtx::run_rate);
    if (validate->parsed()) {
        const auto results =
            matrixtx::run_acceptance_criteria(validate_args.threads, &std::cerr);
        const int failures = matrixtx::print_criteria_report(results, std::cout);
        return failures == 0 ? kExitOk : kExitValidationFailure;
    }
    return kExitConfigError;
}
