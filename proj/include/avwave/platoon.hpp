// Oscillation spectra through vehicle strings and closed-form trajectories.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "avwave/dfa.hpp"
#include "avwave/freq.hpp"
#include "avwave/model.hpp"

namespace avwave {

/// One leader position-oscillation component A sin(omega t + phase0).
struct OscComponent {
    double amplitude = 0.0;  ///< [m]
    double omega = 1.0;      ///< [rad/s]
    double phase0 = 0.0;     ///< [rad]

    double speed_amplitude() const { return amplitude * omega; }
    void validate() const;

    /// Converts a speed amplitude [m/s] into the position amplitude v_amp / omega.
    static OscComponent from_speed_amplitude(double speed_amplitude, double omega, double phase0 = 0.0);
};

/// Leader (index 0) followed by vehicles[0..N-1] as vehicles 1..N.
struct PlatoonSpec {
    std::vector<ControllerSpec> vehicles;
    Equilibrium equilibrium;
    bool bounds_enabled = false;

    void validate() const;
    std::size_t followers() const { return vehicles.size(); }
    const ControllerSpec& vehicle(std::size_t i) const { return vehicles.at(i - 1); }
    /// s_{e,i} for follower i in 1..N.
    double spacing(std::size_t i) const;
    /// Sum of s_{e,h} for h = 1..i (0 for the leader).
    double cumulative_spacing(std::size_t i) const;
    SpeedBounds bounds() const { return SpeedBounds::from(equilibrium); }

    static PlatoonSpec homogeneous(const ControllerSpec& spec, std::size_t followers, const Equilibrium& eq,
                                   bool bounds_enabled = false);
};

/// Cumulative oscillation of one component at one vehicle.
struct SpectrumEntry {
    double omega = 0.0;
    double amplitude = 0.0;  ///< A_m times the product of stage magnitudes up to this vehicle [m]
    double phase = 0.0;      ///< phase0 plus the sum of stage phases up to this vehicle [rad]
    FrequencyResponse stage;  ///< transfer of the stage feeding this vehicle (identity at the leader)
    BoundaryCase boundary = BoundaryCase::Inactive;
};

struct VehicleSpectrum {
    std::size_t index = 0;
    std::vector<SpectrumEntry> components;
    /// Set when bounds clipped some stage and several components were
    /// superposed, so the per-component result is an approximation.
    bool approximate = false;
};

struct StageResult {
    FrequencyResponse response;
    BoundaryCase boundary = BoundaryCase::Inactive;
};

/// Stage model for follower `vehicle` at `omega`, given the upstream speed
/// amplitude of that component.
using StageModel = std::function<StageResult(std::size_t vehicle, double omega, double input_speed_amplitude)>;

/// Propagates with a caller-supplied stage model through `followers` stages.
std::vector<VehicleSpectrum> propagate_spectrum(std::size_t followers, std::span<const OscComponent> input,
                                                const StageModel& stage);

/// Per-vehicle transfer_at, or describing_transfer with the upstream speed
/// amplitude when bounds are enabled. Numerical failures are rethrown with
/// the offending vehicle index.
std::vector<VehicleSpectrum> propagate_spectrum(const PlatoonSpec& platoon, std::span<const OscComponent> input);

/// p_i(t) = p0_origin - sum_{h<=i} s_{e,h} + v_e t + sum_m amp_{i,m} sin(omega_m t + phase_{i,m}).
double analytic_position(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra, std::size_t i,
                         double t, double p0_origin);
/// Exact time derivative of analytic_position.
double analytic_speed(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra, std::size_t i, double t);
double analytic_acceleration(std::span<const VehicleSpectrum> spectra, std::size_t i, double t);

/// Component with the largest cumulative amplitude; ties go to the lower frequency.
std::size_t predominant_component(const VehicleSpectrum& spectrum);

/// Smallest i with a_other g_other^i > a_dominant g_dominant^i. Requires
/// a_dominant >= a_other > 0 and positive gains; throws std::domain_error
/// ("no crossover") when g_other <= g_dominant.
std::size_t crossover_index(double a_dominant, double a_other, double g_dominant, double g_other);

}  // namespace avwave
