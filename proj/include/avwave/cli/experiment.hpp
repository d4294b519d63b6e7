// Experiment runner and built-in presets.
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avwave/cli/config.hpp"

namespace avwave::cli {

struct PresetRun {
    std::string subdir;  ///< empty = write straight into the output directory
    ExperimentConfig config;
};

std::vector<std::string> preset_names();

/// fig4, fig5-10, fig11, fig12. `omega_override` replaces the input
/// frequency of every run. Throws ConfigError for unknown names.
std::vector<PresetRun> preset(const std::string& name, std::optional<double> omega_override = std::nullopt);

struct RunOptions {
    std::size_t workers = 1;
};

struct OutputFile {
    std::string name;
    std::string content;
};

/// Renders the files for the config's mode; `outputs` narrows the analysis
/// outputs (empty = the config's own list). Nothing touches the disk.
std::vector<OutputFile> render_outputs(const ExperimentConfig& config, const RunOptions& options,
                                       std::span<const std::string> outputs = {});

/// Renders everything first, then writes config.ini plus every file into
/// `out_dir`. Returns the written paths.
std::vector<std::filesystem::path> run_config(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                              const RunOptions& options, std::span<const std::string> outputs = {});

std::vector<std::filesystem::path> run_preset(const std::string& name, const std::filesystem::path& out_dir,
                                              const RunOptions& options,
                                              std::optional<double> omega_override = std::nullopt);

}  // namespace avwave::cli
