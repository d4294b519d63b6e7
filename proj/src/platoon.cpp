#include "avwave/platoon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "avwave/errors.hpp"

namespace avwave {

void OscComponent::validate() const {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw std::invalid_argument("oscillation amplitude must be >= 0");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("oscillation omega must be > 0");
    if (!std::isfinite(phase0)) throw std::invalid_argument("oscillation phase must be finite");
}

OscComponent OscComponent::from_speed_amplitude(double speed_amplitude, double omega, double phase0) {
    if (!(omega > 0.0)) throw std::invalid_argument("oscillation omega must be > 0");
    return OscComponent{.amplitude = speed_amplitude / omega, .omega = omega, .phase0 = phase0};
}

void PlatoonSpec::validate() const {
    if (vehicles.empty()) throw std::invalid_argument("platoon has no followers");
    equilibrium.validate();
    for (const auto& v : vehicles) v.validate();
}

double PlatoonSpec::spacing(std::size_t i) const {
    if (i == 0 || i > vehicles.size()) throw std::out_of_range("platoon: follower index out of range");
    return equilibrium_spacing(vehicles[i - 1], equilibrium.v_e);
}

double PlatoonSpec::cumulative_spacing(std::size_t i) const {
    double total = 0.0;
    for (std::size_t h = 1; h <= i; ++h) total += spacing(h);
    return total;
}

PlatoonSpec PlatoonSpec::homogeneous(const ControllerSpec& spec, std::size_t followers, const Equilibrium& eq,
                                     bool bounds_enabled) {
    return PlatoonSpec{std::vector<ControllerSpec>(followers, spec), eq, bounds_enabled};
}

std::vector<VehicleSpectrum> propagate_spectrum(std::size_t followers, std::span<const OscComponent> input,
                                                const StageModel& stage) {
    for (std::size_t m = 0; m < input.size(); ++m) {
        input[m].validate();
        for (std::size_t k = 0; k < m; ++k) {
            if (input[k].omega == input[m].omega) {
                throw std::invalid_argument("oscillation components must have distinct frequencies");
            }
        }
    }

    std::vector<VehicleSpectrum> out(followers + 1);
    out[0].index = 0;
    for (const auto& c : input) {
        out[0].components.push_back(SpectrumEntry{
            .omega = c.omega,
            .amplitude = c.amplitude,
            .phase = c.phase0,
            .stage = make_response(c.omega, 1.0, 0.0),
        });
    }

    bool clipped = false;
    for (std::size_t i = 1; i <= followers; ++i) {
        out[i].index = i;
        for (const auto& up : out[i - 1].components) {
            const StageResult r = stage(i, up.omega, up.amplitude * up.omega);
            clipped = clipped || r.boundary != BoundaryCase::Inactive;
            out[i].components.push_back(SpectrumEntry{
                .omega = up.omega,
                .amplitude = up.amplitude * r.response.magnitude,
                .phase = up.phase + r.response.phase,
                .stage = r.response,
                .boundary = r.boundary,
            });
        }
        out[i].approximate = clipped && input.size() > 1;
    }
    return out;
}

std::vector<VehicleSpectrum> propagate_spectrum(const PlatoonSpec& platoon, std::span<const OscComponent> input) {
    platoon.validate();
    std::vector<LinearGains> gains;
    gains.reserve(platoon.followers());
    for (const auto& v : platoon.vehicles) gains.push_back(linearize(v));
    const SpeedBounds bounds = platoon.bounds();
    const bool clip = platoon.bounds_enabled;

    const StageModel stage = [&](std::size_t i, double omega, double input_speed_amplitude) {
        try {
            const FrequencyResponse linear = transfer_at(gains[i - 1], omega);
            if (!clip || !(input_speed_amplitude > 0.0)) return StageResult{linear, BoundaryCase::Inactive};
            return StageResult{describing_transfer(linear, input_speed_amplitude, bounds),
                               classify_boundary_case(linear, input_speed_amplitude, bounds)};
        } catch (const NumericalError& e) {
            throw NumericalError("vehicle " + std::to_string(i) + ": " + e.what());
        }
    };
    return propagate_spectrum(platoon.followers(), input, stage);
}

double analytic_position(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra, std::size_t i,
                         double t, double p0_origin) {
    const auto& spec = spectra[i];
    double osc = 0.0;
    for (const auto& c : spec.components) osc += c.amplitude * std::sin(c.omega * t + c.phase);
    return p0_origin - platoon.cumulative_spacing(i) + platoon.equilibrium.v_e * t + osc;
}

double analytic_speed(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra, std::size_t i, double t) {
    double osc = 0.0;
    for (const auto& c : spectra[i].components) osc += c.amplitude * c.omega * std::cos(c.omega * t + c.phase);
    return platoon.equilibrium.v_e + osc;
}

double analytic_acceleration(std::span<const VehicleSpectrum> spectra, std::size_t i, double t) {
    double osc = 0.0;
    for (const auto& c : spectra[i].components) {
        osc -= c.amplitude * c.omega * c.omega * std::sin(c.omega * t + c.phase);
    }
    return osc;
}

std::size_t predominant_component(const VehicleSpectrum& spectrum) {
    if (spectrum.components.empty()) throw std::invalid_argument("predominant_component: empty spectrum");
    std::size_t best = 0;
    for (std::size_t m = 1; m < spectrum.components.size(); ++m) {
        const auto& c = spectrum.components[m];
        const auto& b = spectrum.components[best];
        if (c.amplitude > b.amplitude || (c.amplitude == b.amplitude && c.omega < b.omega)) best = m;
    }
    return best;
}

std::size_t crossover_index(double a_dominant, double a_other, double g_dominant, double g_other) {
    if (!(a_other > 0.0) || !(a_dominant >= a_other) || !(g_dominant > 0.0) || !(g_other > 0.0)) {
        throw std::invalid_argument("crossover_index: need a_dominant >= a_other > 0 and positive gains");
    }
    if (!(g_other > g_dominant)) throw std::domain_error("no crossover");

    const auto flipped = [&](std::size_t i) {
        const double n = static_cast<double>(i);
        return std::log(a_other) + n * std::log(g_other) > std::log(a_dominant) + n * std::log(g_dominant);
    };
    const double ratio = std::log(a_dominant / a_other) / std::log(g_other / g_dominant);
    auto i = static_cast<std::size_t>(std::floor(ratio)) + 1;
    while (i > 0 && flipped(i - 1)) --i;
    while (!flipped(i)) ++i;
    return i;
}

}  // namespace avwave
