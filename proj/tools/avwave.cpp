// avwave command-line front end.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "avwave/cli/config.hpp"
#include "avwave/cli/experiment.hpp"
#include "avwave/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string config;
    std::string out = ".";
    std::size_t workers = 1;
    unsigned long long seed = 0;  // reserved
    std::string preset;
    std::optional<double> omega;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "Experiment config file");
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--workers", o.workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Reserved; all paths are deterministic");
}

avwave::cli::ExperimentConfig require_config(const Options& o) {
    if (o.config.empty()) throw avwave::cli::ConfigError("--config is required for this command");
    return avwave::cli::load_config(o.config);
}

void report(const std::vector<std::filesystem::path>& written) {
    for (const auto& p : written) std::printf("%s\n", p.string().c_str());
}

int run(const std::string& command, const Options& o) {
    using namespace avwave::cli;
    const RunOptions run_opts{o.workers};
    if (command == "experiment") {
        if (!o.preset.empty() && !o.config.empty()) throw ConfigError("give a preset or --config, not both");
        if (!o.preset.empty()) {
            report(run_preset(o.preset, o.out, run_opts, o.omega));
            return 0;
        }
        ExperimentConfig c = require_config(o);
        if (o.omega) {
            for (auto& in : c.input) in.omega = *o.omega;
        }
        report(run_config(c, o.out, run_opts));
        return 0;
    }

    ExperimentConfig c = require_config(o);
    std::vector<std::string> outputs;
    if (command == "freq-response") {
        outputs = {"frequency_response"};
    } else if (command == "dfa") {
        outputs = {"dfa"};
    } else if (command == "platoon") {
        outputs = {"spectrum"};
    } else if (command == "wave") {
        outputs = {"wave_speed", "wave_summary"};
    } else if (command == "simulate") {
        outputs = {"trajectory"};
        if (c.input.size() == 1) outputs.push_back("stage_fit");
    } else if (command == "sweep") {
        c.mode = "sweep";
    }
    if (command != "sweep") c.mode = "analysis";
    report(run_config(c, o.out, run_opts, outputs));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-domain analysis of oscillation propagation and wave speed in AV platoons"};
    app.require_subcommand(1);
    Options o;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"freq-response", "Stage transfer over the [frequency] grid"},
        {"dfa", "Describing-function transfer under speed bounds"},
        {"platoon", "Per-vehicle oscillation spectrum"},
        {"wave", "Wave speed series and per-pair summary"},
        {"simulate", "Time-domain simulation and fitted stage gains"},
        {"sweep", "One- or two-parameter sweep of the stage transfer"},
        {"experiment", "Run a preset or a full config"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common(cmd, o);
        subs.push_back(cmd);
    }
    CLI::App* experiment = subs.back();
    experiment->add_option("preset", o.preset, "fig4, fig5-10, fig11 or fig12");
    experiment->add_option("--omega-rad-s", o.omega, "Override the input angular frequency")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    std::string command;
    for (const CLI::App* cmd : subs) {
        if (cmd->parsed()) command = cmd->get_name();
    }

    try {
        return run(command, o);
    } catch (const avwave::cli::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "invalid input: {}\n", e.what());
        return kExitConfig;
    } catch (const avwave::NumericalError& e) {
        fmt::print(stderr, "numerical error: {}\n", e.what());
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        fmt::print(stderr, "numerical error: {}\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
