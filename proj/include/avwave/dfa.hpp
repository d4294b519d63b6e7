// Describing-function (first-harmonic) treatment of follower speed saturation.
//
// The follower's steady speed deviation is modelled as the linear response
// |G| A sin(theta + arg G) passed through a clamp to [lower, upper]. The
// nonlinear transfer G_nl is the first Fourier harmonic of the clamped signal
// divided by the leader's input amplitude A. Projections are integrated
// numerically, segment by segment between the analytically known clipping
// angles.
#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "avwave/freq.hpp"
#include "avwave/model.hpp"

namespace avwave {

/// Admissible speed deviation, [-v_e, v_free - v_e] for a speed range [0, v_free].
struct SpeedBounds {
    double lower = -15.0;
    double upper = 15.0;

    /// Requires lower < 0 < upper.
    void validate() const;
    static SpeedBounds from(const Equilibrium& eq);
};

enum class BoundaryCase { Inactive, UpperActive, LowerActive, BothActive };

std::string_view to_string(BoundaryCase c);

/// O(theta) ~ y11 sin(theta) + y12 cos(theta).
struct FirstHarmonic {
    double y11 = 0.0;
    double y12 = 0.0;

    double amplitude() const;
};

/// 2 pi-periodic signal of the phase angle. `breakpoints` lists the angles in
/// [0, 2 pi) where the signal or its derivative is discontinuous.
struct Waveform {
    std::function<double(double)> signal;
    std::vector<double> breakpoints;

    double operator()(double theta) const { return signal(theta); }
};

BoundaryCase classify_boundary_case(const FrequencyResponse& linear, double input_amplitude,
                                    const SpeedBounds& bounds);

/// theta -> clamp(|G| A sin(theta + arg G), lower, upper).
Waveform clipped_output(const FrequencyResponse& linear, double input_amplitude, const SpeedBounds& bounds);

/// Projects the waveform on sin and cos over [-reference_phase,
/// 2 pi - reference_phase]. Throws NumericalError when the quadrature error
/// estimate exceeds 1e-9 relative to the signal amplitude.
FirstHarmonic first_harmonic(const Waveform& wave, double reference_phase = 0.0);

/// G_nl. The Inactive case returns `linear` unchanged; otherwise the phase is
/// placed on the branch nearest to linear.phase.
FrequencyResponse describing_transfer(const FrequencyResponse& linear, double input_amplitude,
                                      const SpeedBounds& bounds);

}  // namespace avwave
