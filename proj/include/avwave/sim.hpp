// Time-domain oracle: fixed-step integration of the third-order follower
// dynamics behind an analytic oscillating leader, plus measurement helpers.
#pragma once

#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "avwave/platoon.hpp"
#include "avwave/wave.hpp"

namespace avwave {

enum class Integrator { RK4 };

struct SimConfig {
    double dt = 0.005;          ///< [s]
    int warmup_periods = 10;    ///< of the slowest input component
    int measure_periods = 4;
    Integrator integrator = Integrator::RK4;
    std::size_t record_stride = 1;  ///< keep every n-th step
    double p0_origin = 0.0;         ///< leader nominal position at t = 0 [m]

    /// Requires dt <= min(phi_min, 2 pi / omega_max) / 20, warmup >= 5,
    /// measure >= 2 and record_stride >= 1.
    void validate(double phi_min, double omega_max) const;
};

struct VehicleSeries {
    std::vector<double> position;
    std::vector<double> speed;
    std::vector<double> acceleration;
};

/// vehicles[0] is the leader.
struct Trajectory {
    std::vector<double> t;
    std::vector<VehicleSeries> vehicles;
    double steady_from = 0.0;  ///< end of warmup [s]
    double min_spacing = std::numeric_limits<double>::infinity();  ///< over recorded samples [m]
};

/// Followers start on the equilibrium manifold (spacing s_{e,i}, speed v_e,
/// zero acceleration); the leader follows its closed-form trajectory. With
/// bounds enabled follower speed is projected onto [0, v_free] and
/// acceleration pointing out of the range is zeroed. Vehicles are points:
/// negative spacing is integrated through and shows up in min_spacing.
/// Throws NumericalError on |a| > 1e3 m/s^2, naming the vehicle and time.
Trajectory simulate_platoon(const PlatoonSpec& platoon, std::span<const OscComponent> input, const SimConfig& config);

/// Samples the closed-form trajectories at the given times.
Trajectory analytic_trajectory(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra,
                               std::span<const double> times, double p0_origin);

struct HarmonicFit {
    double amplitude = 0.0;
    double phase = 0.0;   ///< y ~ offset + amplitude sin(omega t + phase)
    double offset = 0.0;
};

struct FitWindow {
    double start = 0.0;
    int periods = 0;
};

/// Least-squares fit of offset + sin + cos over an integer number of periods.
/// Throws std::invalid_argument if the window starts before `steady_from`,
/// runs past the data, or holds too few samples.
HarmonicFit fit_first_harmonic(std::span<const double> t, std::span<const double> y, double omega, FitWindow window,
                               double steady_from);

/// Window of `periods` periods starting at the end of warmup.
FitWindow measurement_window(const Trajectory& traj, int periods);

/// Pairs the peak acceleration/deceleration instants of vehicle i-1 with the
/// next same-sign peak of vehicle i and measures travel time, position drop
/// and their ratio. Emission times are traced back to the leader. Throws
/// NumericalError when no extrema stand out (flat signal).
std::vector<WaveSample> empirical_wave_estimate(const Trajectory& traj, std::size_t pair);

/// CSV `t,vehicle,position,speed,acceleration`, 9 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace avwave
