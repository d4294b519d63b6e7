#include "avwave/freq.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "avwave/errors.hpp"

namespace avwave {

namespace {

void require_sorted_positive(std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("frequency grid is empty");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] > 0.0)) throw std::invalid_argument("frequency grid must be strictly positive");
        if (k > 0 && !(grid[k] > grid[k - 1])) throw std::invalid_argument("frequency grid must be sorted");
    }
}

}  // namespace

FrequencyResponse make_response(double omega, double magnitude, double phase) {
    return FrequencyResponse{
        .omega = omega,
        .value = std::polar(magnitude, phase),
        .magnitude = magnitude,
        .phase = phase,
        .response_time = -phase / omega,
    };
}

FrequencyResponse transfer_at(const LinearGains& gains, double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw std::invalid_argument("transfer_at: omega must be > 0");
    }
    gains.validate();

    const std::complex<double> num{gains.f_p, omega * gains.f_lead};
    const std::complex<double> den{gains.f_p - omega * omega,
                                   omega * gains.f_self - gains.phi * omega * omega * omega};
    if (den == 0.0) {
        throw NumericalError("transfer_at: denominator vanishes (undamped resonance)");
    }

    // Re(den) changes sign once at w^2 = f_p and Im(den) once at
    // w^2 = f_self/phi. When the real axis is crossed first the path enters
    // the third quadrant from the second, so arg(den) continues past pi.
    double den_arg = std::arg(den);
    const bool real_crosses_first = gains.f_self > 0.0 && gains.f_p < gains.f_self / gains.phi;
    if (real_crosses_first && den.real() < 0.0 && den.imag() < 0.0) {
        den_arg += 2.0 * std::numbers::pi;
    }

    const std::complex<double> value = num / den;
    const double phase = std::arg(num) - den_arg;
    return FrequencyResponse{
        .omega = omega,
        .value = value,
        .magnitude = std::abs(value),
        .phase = phase,
        .response_time = -phase / omega,
    };
}

FrequencyResponse newell_transfer(double displacement, double omega) {
    if (!(displacement > 0.0) || !(omega > 0.0)) {
        throw std::invalid_argument("newell_transfer: displacement and omega must be > 0");
    }
    const double phase = -omega * displacement;
    return FrequencyResponse{
        .omega = omega,
        .value = std::polar(1.0, phase),
        .magnitude = 1.0,
        .phase = phase,
        .response_time = displacement,
    };
}

std::vector<FrequencyResponse> frequency_sweep(const LinearGains& gains, std::span<const double> omega_grid) {
    require_sorted_positive(omega_grid);
    std::vector<FrequencyResponse> out;
    out.reserve(omega_grid.size());
    for (const double w : omega_grid) out.push_back(transfer_at(gains, w));
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        throw std::invalid_argument("log_grid: need 0 < lo < hi and n >= 2");
    }
    std::vector<double> grid(n);
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) grid[k] = std::exp(a + step * static_cast<double>(k));
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> default_stability_grid() { return log_grid(1e-3, 1e2, 2000); }

StabilityMargin string_stability_margin(const LinearGains& gains, std::span<const double> omega_grid) {
    const auto responses = frequency_sweep(gains, omega_grid);
    return string_stability_margin(responses);
}

StabilityMargin string_stability_margin(std::span<const FrequencyResponse> responses) {
    if (responses.empty()) throw std::invalid_argument("string_stability_margin: no responses");
    const auto best = std::max_element(responses.begin(), responses.end(),
                                       [](const auto& a, const auto& b) { return a.magnitude < b.magnitude; });
    return StabilityMargin{best->magnitude, best->omega};
}

}  // namespace avwave
