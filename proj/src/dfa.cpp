#include "avwave/dfa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "avwave/errors.hpp"

namespace avwave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_positive(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0.0) r += period;
    return r;
}

// Angles theta in [0, 2 pi) where amp * sin(theta + shift) == level.
void push_crossings(std::vector<double>& out, double amp, double shift, double level) {
    if (!(std::abs(level) < amp)) return;
    const double base = std::asin(level / amp);
    out.push_back(wrap_positive(base - shift, kTwoPi));
    out.push_back(wrap_positive(std::numbers::pi - base - shift, kTwoPi));
}

}  // namespace

void SpeedBounds::validate() const {
    if (!(lower < 0.0) || !(upper > 0.0) || !std::isfinite(lower) || !std::isfinite(upper)) {
        throw std::invalid_argument("speed bounds must satisfy lower < 0 < upper");
    }
}

SpeedBounds SpeedBounds::from(const Equilibrium& eq) {
    eq.validate();
    return SpeedBounds{.lower = -eq.v_e, .upper = eq.v_free - eq.v_e};
}

std::string_view to_string(BoundaryCase c) {
    switch (c) {
        case BoundaryCase::Inactive: return "inactive";
        case BoundaryCase::UpperActive: return "upper";
        case BoundaryCase::LowerActive: return "lower";
        case BoundaryCase::BothActive: return "both";
    }
    return "?";
}

double FirstHarmonic::amplitude() const { return std::hypot(y11, y12); }

BoundaryCase classify_boundary_case(const FrequencyResponse& linear, double input_amplitude,
                                    const SpeedBounds& bounds) {
    if (!(input_amplitude > 0.0)) throw std::invalid_argument("input amplitude must be > 0");
    bounds.validate();
    const double out_amp = linear.magnitude * input_amplitude;
    const bool hits_upper = out_amp > bounds.upper;
    const bool hits_lower = out_amp > -bounds.lower;
    if (hits_upper && hits_lower) return BoundaryCase::BothActive;
    if (hits_upper) return BoundaryCase::UpperActive;
    if (hits_lower) return BoundaryCase::LowerActive;
    return BoundaryCase::Inactive;
}

Waveform clipped_output(const FrequencyResponse& linear, double input_amplitude, const SpeedBounds& bounds) {
    if (!(input_amplitude > 0.0)) throw std::invalid_argument("input amplitude must be > 0");
    bounds.validate();
    const double amp = linear.magnitude * input_amplitude;
    const double shift = linear.phase;
    const double lo = bounds.lower;
    const double hi = bounds.upper;

    Waveform wave;
    wave.signal = [amp, shift, lo, hi](double theta) { return std::clamp(amp * std::sin(theta + shift), lo, hi); };
    push_crossings(wave.breakpoints, amp, shift, hi);
    push_crossings(wave.breakpoints, amp, shift, lo);
    std::sort(wave.breakpoints.begin(), wave.breakpoints.end());
    return wave;
}

FirstHarmonic first_harmonic(const Waveform& wave, double reference_phase) {
    using boost::math::quadrature::gauss_kronrod;

    const double start = -reference_phase;
    const double stop = start + kTwoPi;

    std::vector<double> nodes{start, stop};
    for (const double b : wave.breakpoints) {
        const double mapped = start + wrap_positive(b - start, kTwoPi);
        if (mapped > start && mapped < stop) nodes.push_back(mapped);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    double scale = 0.0;
    for (int k = 0; k < 64; ++k) {
        scale = std::max(scale, std::abs(wave(start + kTwoPi * k / 64.0)));
    }

    // Each segment is smooth, so an adaptive Gauss-Kronrod rule converges
    // quickly. Boost reports the error in units of the [-1, 1] mapped
    // interval; half the segment length converts it to an absolute bound.
    constexpr unsigned kMaxDepth = 8;
    constexpr double kRelTol = 1e-12;
    double sin_part = 0.0;
    double cos_part = 0.0;
    double abs_err = 0.0;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        const double a = nodes[k];
        const double b = nodes[k + 1];
        if (!(b > a)) continue;
        double err_s = 0.0;
        double err_c = 0.0;
        sin_part += gauss_kronrod<double, 31>::integrate(
            [&wave](double t) { return wave(t) * std::sin(t); }, a, b, kMaxDepth, kRelTol, &err_s);
        cos_part += gauss_kronrod<double, 31>::integrate(
            [&wave](double t) { return wave(t) * std::cos(t); }, a, b, kMaxDepth, kRelTol, &err_c);
        abs_err += 0.5 * (b - a) * (err_s + err_c);
    }

    if (!std::isfinite(sin_part) || !std::isfinite(cos_part) ||
        abs_err / std::numbers::pi > 1e-9 * std::max(scale, 1e-12)) {
        throw NumericalError("first_harmonic: quadrature did not converge");
    }
    return FirstHarmonic{.y11 = sin_part / std::numbers::pi, .y12 = cos_part / std::numbers::pi};
}

FrequencyResponse describing_transfer(const FrequencyResponse& linear, double input_amplitude,
                                      const SpeedBounds& bounds) {
    if (classify_boundary_case(linear, input_amplitude, bounds) == BoundaryCase::Inactive) {
        return linear;
    }
    const FirstHarmonic h = first_harmonic(clipped_output(linear, input_amplitude, bounds));
    const double magnitude = h.amplitude() / input_amplitude;
    const double principal = std::atan2(h.y12, h.y11);
    const double phase = linear.phase + std::remainder(principal - linear.phase, kTwoPi);
    return make_response(linear.omega, magnitude, phase);
}

}  // namespace avwave
