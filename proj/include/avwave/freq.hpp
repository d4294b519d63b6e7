// Frequency response of the follower-to-leader transfer G(jw).
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "avwave/model.hpp"

namespace avwave {

struct FrequencyResponse {
    double omega = 0.0;               ///< [rad/s]
    std::complex<double> value{1.0};  ///< G(j omega)
    double magnitude = 1.0;           ///< |G|
    double phase = 0.0;               ///< arg G, continued along omega from 0 at omega -> 0+
    double response_time = 0.0;       ///< -phase / omega [s]
};

/// Builds a response from a magnitude and a phase branch chosen by the caller.
FrequencyResponse make_response(double omega, double magnitude, double phase);

/// G(jw) = (f_p + j w f_lead) / ((f_p - w^2) + j (w f_self - phi w^3)).
///
/// The phase is the branch reached by continuing arg G from 0 as omega grows
/// from 0+. It equals the principal value whenever that value lies in
/// (-pi, pi]. Throws std::invalid_argument for omega <= 0 and NumericalError
/// when the denominator vanishes (undamped resonance).
FrequencyResponse transfer_at(const LinearGains& gains, double omega);

/// Pure delay by `displacement` seconds: G = exp(-j omega displacement).
FrequencyResponse newell_transfer(double displacement, double omega);

std::vector<FrequencyResponse> frequency_sweep(const LinearGains& gains, std::span<const double> omega_grid);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// 2000 log-spaced points over [1e-3, 1e2] rad/s.
std::vector<double> default_stability_grid();

struct StabilityMargin {
    double sup_magnitude = 0.0;
    double argmax_omega = 0.0;
};

/// Maximum |G| over the grid; sup <= 1 means linear string stability over
/// the scanned band. The grid must be nonempty, positive and sorted.
StabilityMargin string_stability_margin(const LinearGains& gains, std::span<const double> omega_grid);
StabilityMargin string_stability_margin(std::span<const FrequencyResponse> responses);

}  // namespace avwave
