// Experiment configuration: flat INI-style text with unit-suffixed keys.
//
//   [run]          name, mode (analysis | sweep | dfa_study), outputs
//   [controller]   k_s_per_s2, k_v_per_s, tau_s, phi_s, s_0_m
//   [vehicle.N]    per-follower overrides of [controller] keys
//   [equilibrium]  v_e_mps, v_free_mps
//   [platoon]      followers, bounds_enabled
//   [input]        speed_amplitude_mps, omega_rad_s | frequency_hz, phase_rad
//   [frequency]    omega_min_rad_s, omega_max_rad_s, points, vehicle
//   [wave]         pairs, t_start_s, t_end_s, t_step_s
//   [sim]          dt_s, warmup_periods, measure_periods, record_stride, p0_origin_m
//   [sweep]        param1, values1, param2, values2
//   [dfa]          ratios
//
// Lists are comma separated. '#' and ';' start comments.
#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "avwave/model.hpp"
#include "avwave/platoon.hpp"
#include "avwave/sim.hpp"

namespace avwave::cli {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message, int line = 0);
    int line() const { return line_; }

private:
    int line_;
};

struct InputSpec {
    double speed_amplitude = 0.0;  ///< [m/s]
    double omega = 0.0;            ///< [rad/s]
    double phase = 0.0;            ///< [rad]
};

struct FrequencyGrid {
    double omega_min = 1e-3;
    double omega_max = 10.0;
    int points = 400;
    std::size_t vehicle = 1;  ///< follower whose stage transfer is reported

    std::vector<double> omegas() const;
};

/// Emission-time grid for wave series. Zeros select defaults: two periods of
/// the slowest component sampled 40 times per period.
struct WaveGrid {
    std::vector<std::size_t> pairs;  ///< empty = every pair
    double t_start = 0.0;
    double t_end = 0.0;
    double t_step = 0.0;
};

struct SweepAxis {
    std::string param;
    std::vector<double> values;
};

struct SweepSpec {
    SweepAxis first;
    std::optional<SweepAxis> second;
};

struct ExperimentConfig {
    std::string name = "custom";
    std::string mode = "analysis";
    std::vector<std::string> outputs{"frequency_response", "spectrum", "wave_speed"};

    ControllerSpec controller;
    std::map<std::size_t, ControllerSpec> overrides;  ///< follower index -> full spec
    Equilibrium equilibrium;
    std::size_t followers = 1;
    bool bounds_enabled = false;
    std::vector<InputSpec> input;

    FrequencyGrid frequency;
    WaveGrid wave;
    SimConfig sim;
    SweepSpec sweep;
    std::vector<double> dfa_ratios;

    PlatoonSpec platoon() const;
    std::vector<OscComponent> components() const;

    /// Checks every value with the owning module; throws ConfigError.
    void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(render_config(c)) reproduces c exactly.
std::string render_config(const ExperimentConfig& config);

bool is_output_name(const std::string& name);

}  // namespace avwave::cli
