// Parameter sweeps over one or two controller/equilibrium parameters.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avwave/cli/config.hpp"

namespace avwave::cli {

struct SweepRow {
    double param1 = 0.0;
    std::optional<double> param2;
    double omega = 0.0;
    double magnitude = 0.0;
    double phase = 0.0;
    double response_time = 0.0;
    double wave_speed_mean = 0.0;       ///< pair 1, leader input [m/s]
    double wave_speed_amplitude = 0.0;  ///< [m/s]
};

/// Sets a sweepable parameter (shared controller, equilibrium speed or the
/// speed amplitude of every input component). Throws ConfigError.
void apply_parameter(ExperimentConfig& config, const std::string& param, double value);

/// Evaluates every grid point on up to `workers` threads. Rows are sorted by
/// (param1, param2, omega) so the result does not depend on scheduling.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, std::size_t workers);

/// param1,param2,omega,magnitude,phase,response_time,wave_speed_mean,wave_speed_amplitude
std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace avwave::cli
