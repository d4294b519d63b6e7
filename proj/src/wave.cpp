#include "avwave/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "avwave/errors.hpp"

namespace avwave {

namespace {

void require_pair(std::span<const VehicleSpectrum> spectra, std::size_t i) {
    if (i == 0 || i >= spectra.size()) throw std::out_of_range("wave: pair index out of range");
}

}  // namespace

std::string wave_flags_string(unsigned flags) {
    std::string out;
    const auto add = [&out](const char* s) {
        if (!out.empty()) out += '|';
        out += s;
    };
    if (flags & kWaveTraditional) add("traditional");
    if (flags & kWaveDfaApproximate) add("dfa_approx");
    if (flags & kWavePredominantOnly) add("predominant");
    return out;
}

double pair_wave_travel_time(const FrequencyResponse& stage_transfer) {
    if (!(stage_transfer.phase < 0.0)) {
        throw NumericalError("acausal stage: phase must be negative for a wave to travel upstream");
    }
    return -stage_transfer.phase / stage_transfer.omega;
}

WaveSample pair_wave(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra, std::size_t i,
                     double emission_time) {
    require_pair(spectra, i);
    const VehicleSpectrum& upstream = spectra[i - 1];
    const std::size_t p = predominant_component(upstream);
    const SpectrumEntry& up = upstream.components[p];
    const SpectrumEntry& here = spectra[i].components.at(p);
    const double phase0 = spectra[0].components.at(p).phase;

    WaveSample s;
    s.pair = i;
    s.emission_time = emission_time;
    s.travel_time = pair_wave_travel_time(here.stage);
    s.shifted_distance = platoon.spacing(i) - platoon.equilibrium.v_e * s.travel_time +
                         up.amplitude * (1.0 - here.stage.magnitude) * std::sin(up.omega * emission_time + phase0);
    s.speed = s.shifted_distance / s.travel_time;

    if (here.boundary != BoundaryCase::Inactive) s.flags |= kWaveDfaApproximate;
    if (upstream.components.size() > 1) {
        s.flags |= kWavePredominantOnly;
        double total = 0.0;
        for (const auto& c : upstream.components) total += c.amplitude;
        s.neglected_fraction = total > 0.0 ? (total - up.amplitude) / total : 0.0;
    }
    return s;
}

double pair_shifted_distance(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra, std::size_t i,
                             double emission_time) {
    return pair_wave(platoon, spectra, i, emission_time).shifted_distance;
}

double pair_wave_speed(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra, std::size_t i,
                       double emission_time) {
    return pair_wave(platoon, spectra, i, emission_time).speed;
}

AggregateWave platoon_aggregate_wave(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra,
                                     VehicleRange range, double emission_time) {
    if (!(range.first < range.last) || range.last >= spectra.size()) {
        throw std::out_of_range("aggregate wave: invalid vehicle range");
    }
    if (spectra[0].components.size() != 1) {
        throw std::invalid_argument("aggregate wave: requires a single-component spectrum");
    }

    double travel = 0.0;
    double spacing = 0.0;
    for (std::size_t i = range.first + 1; i <= range.last; ++i) {
        const SpectrumEntry& c = spectra[i].components[0];
        if (c.boundary != BoundaryCase::Inactive) {
            throw std::invalid_argument("aggregate wave: speed bounds active inside the range");
        }
        travel += pair_wave_travel_time(c.stage);
        spacing += platoon.spacing(i);
    }

    const SpectrumEntry& head = spectra[range.first].components[0];
    const SpectrumEntry& tail = spectra[range.last].components[0];
    const double phase0 = spectra[0].components[0].phase;
    const double drop = (head.amplitude - tail.amplitude) * std::sin(head.omega * emission_time + phase0);

    AggregateWave out;
    out.travel_time = travel;
    out.shifted_distance = spacing - platoon.equilibrium.v_e * travel + drop;
    out.average_speed = out.shifted_distance / travel;
    return out;
}

std::vector<WaveSample> wave_speed_series(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra,
                                          std::span<const std::size_t> pairs, std::span<const double> time_grid) {
    if (!std::is_sorted(time_grid.begin(), time_grid.end())) {
        throw std::invalid_argument("wave_speed_series: time grid must be sorted");
    }
    std::vector<WaveSample> out;
    if (time_grid.empty()) return out;

    const double t0 = time_grid.front();
    const double t1 = time_grid.back();
    for (const std::size_t i : pairs) {
        require_pair(spectra, i);
        const std::size_t p = predominant_component(spectra[i - 1]);
        const double omega = spectra[0].components[p].omega;
        const double phase0 = spectra[0].components[p].phase;

        // omega t + phase0 = pi/2 + k pi
        std::vector<std::pair<double, bool>> instants;
        instants.reserve(time_grid.size() + 8);
        for (const double t : time_grid) instants.emplace_back(t, false);
        const double half_turn = std::numbers::pi;
        const auto k_first = static_cast<long long>(std::ceil((omega * t0 + phase0 - half_turn / 2) / half_turn));
        const auto k_last = static_cast<long long>(std::floor((omega * t1 + phase0 - half_turn / 2) / half_turn));
        for (long long k = k_first; k <= k_last; ++k) {
            const double t = (half_turn / 2 + static_cast<double>(k) * half_turn - phase0) / omega;
            if (t >= t0 && t <= t1) instants.emplace_back(t, true);
        }
        std::stable_sort(instants.begin(), instants.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });

        for (const auto& [t, traditional] : instants) {
            WaveSample s = pair_wave(platoon, spectra, i, t);
            if (traditional) s.flags |= kWaveTraditional;
            out.push_back(s);
        }
    }
    return out;
}

}  // namespace avwave
