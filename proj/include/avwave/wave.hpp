// Wave travel times, shifted distances and wave speeds between vehicles.
//
// A wave is parameterized by the time it leaves the platoon leader. It
// reaches vehicle i-1 after the accumulated stage delays, at which point the
// accumulated trajectory phase shift cancels, so every pair sees the leader's
// oscillation phase omega t + phase0. For pair (i-1, i):
//
//   travel time      dt_i = -arg G_i / omega
//   shifted distance h_i  = s_{e,i} - v_e dt_i + amp_{i-1} (1 - |G_i|) sin(omega t + phase0)
//   wave speed       W_i  = h_i / dt_i     (positive = travels upstream)
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "avwave/platoon.hpp"

namespace avwave {

enum WaveFlag : unsigned {
    kWaveTraditional = 1u << 0,      ///< sample at omega t + phase0 = +-pi/2 (peak acceleration)
    kWaveDfaApproximate = 1u << 1,   ///< stage transfer is a describing function
    kWavePredominantOnly = 1u << 2,  ///< several components; only the predominant one is used
};

/// "traditional|dfa_approx|predominant" style rendering; empty for no flags.
std::string wave_flags_string(unsigned flags);

struct WaveSample {
    std::size_t pair = 0;         ///< wave between vehicles pair-1 and pair
    double emission_time = 0.0;   ///< time the wave leaves the leader [s]
    double travel_time = 0.0;     ///< [s]
    double shifted_distance = 0.0;  ///< [m]
    double speed = 0.0;           ///< [m/s]
    unsigned flags = 0;
    double neglected_fraction = 0.0;  ///< amplitude share of components not used
};

/// -phase/omega. Throws NumericalError ("acausal stage") when phase >= 0.
double pair_wave_travel_time(const FrequencyResponse& stage_transfer);

/// Full sample for pair i at the given emission time.
WaveSample pair_wave(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra, std::size_t i,
                     double emission_time);

double pair_shifted_distance(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra, std::size_t i,
                             double emission_time);

double pair_wave_speed(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra, std::size_t i,
                       double emission_time);

/// Vehicles first..last; the range covers pairs first+1..last.
struct VehicleRange {
    std::size_t first = 0;
    std::size_t last = 0;
};

struct AggregateWave {
    double travel_time = 0.0;
    double shifted_distance = 0.0;
    double average_speed = 0.0;
};

/// Whole-range wave for a single-component, unclipped spectrum. Rejects
/// ranges where any stage clipped.
AggregateWave platoon_aggregate_wave(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra,
                                     VehicleRange range, double emission_time);

/// Samples every requested pair over the sorted time grid. The instants in
/// the grid span where omega t + phase0 = +-pi/2 are added and flagged
/// kWaveTraditional. Rows are ordered by pair, then time.
std::vector<WaveSample> wave_speed_series(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra,
                                          std::span<const std::size_t> pairs, std::span<const double> time_grid);

}  // namespace avwave
