// CSV renderers for the analysis outputs and an all-or-nothing file writer.
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "avwave/dfa.hpp"
#include "avwave/freq.hpp"
#include "avwave/platoon.hpp"
#include "avwave/sim.hpp"
#include "avwave/wave.hpp"

namespace avwave::cli {

/// Fixed 12-significant-digit rendering used by every analytic CSV.
std::string csv_number(double v);

/// omega,magnitude,phase,response_time
std::string frequency_response_csv(std::span<const FrequencyResponse> rows);

/// pair,emission_time,travel_time,shifted_distance,speed,flags
std::string wave_speed_csv(std::span<const WaveSample> rows);

/// vehicle,omega,amplitude,phase,stage_magnitude,stage_phase,boundary,approximate
std::string spectrum_csv(std::span<const VehicleSpectrum> spectra);

struct DfaRow {
    double omega = 0.0;
    double input_speed_amplitude = 0.0;
    BoundaryCase boundary = BoundaryCase::Inactive;
    FrequencyResponse linear;
    FrequencyResponse describing;
};

/// omega,input_speed_amplitude,boundary,linear_magnitude,linear_phase,magnitude,phase
std::string dfa_csv(std::span<const DfaRow> rows);

struct WaveSummaryRow {
    std::size_t pair = 0;
    double mean = 0.0;
    double amplitude = 0.0;  ///< half the peak-to-peak range
};

/// Per-pair mean and oscillation amplitude of the wave speed series.
std::vector<WaveSummaryRow> summarize_wave_series(std::span<const WaveSample> series);

/// pair,wave_speed_mean,wave_speed_amplitude
std::string wave_summary_csv(std::span<const WaveSummaryRow> rows);

struct StageFitRow {
    std::size_t vehicle = 0;
    double omega = 0.0;
    double speed_amplitude = 0.0;
    double speed_phase = 0.0;
    double stage_ratio = 0.0;  ///< amplitude relative to the vehicle ahead
    double stage_phase = 0.0;  ///< phase relative to the vehicle ahead, wrapped to (-pi, pi]
};

/// Fits every vehicle's steady speed over the measurement window.
std::vector<StageFitRow> fit_stages(const Trajectory& traj, double omega, int measure_periods);

/// vehicle,omega,speed_amplitude,speed_phase,stage_ratio,stage_phase
std::string stage_fit_csv(std::span<const StageFitRow> rows);

std::string trajectory_csv(const Trajectory& traj);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace avwave::cli
