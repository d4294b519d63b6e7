#include "avwave/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "avwave/errors.hpp"

namespace avwave {

namespace {

constexpr double kBlowUpAccel = 1e3;

struct LeaderState {
    double position;
    double speed;
    double acceleration;
};

LeaderState leader_at(double t, double v_e, double p0_origin, std::span<const OscComponent> input) {
    LeaderState s{p0_origin + v_e * t, v_e, 0.0};
    for (const auto& c : input) {
        const double arg = c.omega * t + c.phase0;
        s.position += c.amplitude * std::sin(arg);
        s.speed += c.amplitude * c.omega * std::cos(arg);
        s.acceleration -= c.amplitude * c.omega * c.omega * std::sin(arg);
    }
    return s;
}

std::string at_time(std::size_t vehicle, double t) {
    return fmt::format("vehicle {} at t = {:.6g} s", vehicle, t);
}

// Follower state is packed as [p, v, a] per vehicle.
class FollowerDynamics {
public:
    FollowerDynamics(const PlatoonSpec& platoon, std::span<const OscComponent> input, double p0_origin)
        : platoon_(platoon), input_(input), p0_origin_(p0_origin) {
        for (std::size_t i = 1; i <= platoon.followers(); ++i) {
            gains_.push_back(linearize(platoon.vehicle(i)));
            spacing_.push_back(platoon.spacing(i));
        }
    }

    double clamp_speed(double v) const {
        return platoon_.bounds_enabled ? std::clamp(v, 0.0, platoon_.equilibrium.v_free) : v;
    }

    void derivative(double t, const std::vector<double>& x, std::vector<double>& dx) const {
        const LeaderState lead = leader_at(t, platoon_.equilibrium.v_e, p0_origin_, input_);
        double prev_p = lead.position;
        double prev_v = lead.speed;
        const double v_free = platoon_.equilibrium.v_free;
        const double v_e = platoon_.equilibrium.v_e;
        for (std::size_t i = 0; i < platoon_.followers(); ++i) {
            const double p = x[3 * i];
            const double v = x[3 * i + 1];
            const double a = x[3 * i + 2];
            const double v_eff = clamp_speed(v);
            // Gap-deviation form of the controller; point vehicles may overlap.
            const LinearGains& g = gains_[i];
            const double u =
                g.f_p * (prev_p - p - spacing_[i]) + g.f_lead * (prev_v - v_e) - g.f_self * (v_eff - v_e);

            double dv = a;
            if (platoon_.bounds_enabled && ((v >= v_free && a > 0.0) || (v <= 0.0 && a < 0.0))) dv = 0.0;
            dx[3 * i] = v_eff;
            dx[3 * i + 1] = dv;
            dx[3 * i + 2] = (u - a) / g.phi;
            prev_p = p;
            prev_v = v_eff;
        }
    }

    void project(std::vector<double>& x) const {
        if (!platoon_.bounds_enabled) return;
        const double v_free = platoon_.equilibrium.v_free;
        for (std::size_t i = 0; i < platoon_.followers(); ++i) {
            double& v = x[3 * i + 1];
            double& a = x[3 * i + 2];
            if (v >= v_free) {
                v = v_free;
                a = std::min(a, 0.0);
            } else if (v <= 0.0) {
                v = 0.0;
                a = std::max(a, 0.0);
            }
        }
    }

private:
    const PlatoonSpec& platoon_;
    std::span<const OscComponent> input_;
    double p0_origin_;
    std::vector<LinearGains> gains_;
    std::vector<double> spacing_;
};

void rk4_step(const FollowerDynamics& dyn, double t, double h, std::vector<double>& x,
              std::array<std::vector<double>, 5>& work) {
    auto& [k1, k2, k3, k4, tmp] = work;
    const std::size_t n = x.size();
    dyn.derivative(t, x, k1);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * h * k1[j];
    dyn.derivative(t + 0.5 * h, tmp, k2);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * h * k2[j];
    dyn.derivative(t + 0.5 * h, tmp, k3);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + h * k3[j];
    dyn.derivative(t + h, tmp, k4);
    for (std::size_t j = 0; j < n; ++j) x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

void record(Trajectory& traj, double t, const LeaderState& lead, const std::vector<double>& x) {
    traj.t.push_back(t);
    traj.vehicles[0].position.push_back(lead.position);
    traj.vehicles[0].speed.push_back(lead.speed);
    traj.vehicles[0].acceleration.push_back(lead.acceleration);
    double ahead = lead.position;
    for (std::size_t i = 1; i < traj.vehicles.size(); ++i) {
        traj.min_spacing = std::min(traj.min_spacing, ahead - x[3 * (i - 1)]);
        ahead = x[3 * (i - 1)];
        traj.vehicles[i].position.push_back(x[3 * (i - 1)]);
        traj.vehicles[i].speed.push_back(x[3 * (i - 1) + 1]);
        traj.vehicles[i].acceleration.push_back(x[3 * (i - 1) + 2]);
    }
}

struct Peak {
    double t;
    bool is_max;
};

double hermite_position(const Trajectory& traj, std::size_t vehicle, double t) {
    const auto& ts = traj.t;
    const auto& p = traj.vehicles[vehicle].position;
    const auto& v = traj.vehicles[vehicle].speed;
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t j = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
    j = std::min(j, ts.size() - 2);
    const double h = ts[j + 1] - ts[j];
    const double s = (t - ts[j]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * p[j] + (s3 - 2 * s2 + s) * h * v[j] + (-2 * s3 + 3 * s2) * p[j + 1] +
           (s3 - s2) * h * v[j + 1];
}

std::vector<Peak> acceleration_peaks(const Trajectory& traj, std::size_t vehicle) {
    const auto& ts = traj.t;
    const auto& a = traj.vehicles[vehicle].acceleration;
    const auto first = static_cast<std::size_t>(
        std::lower_bound(ts.begin(), ts.end(), traj.steady_from) - ts.begin());
    if (first + 3 > ts.size()) throw NumericalError("no extrema: steady window too short");

    const auto [lo_it, hi_it] = std::minmax_element(a.begin() + static_cast<std::ptrdiff_t>(first), a.end());
    const double half = 0.5 * (*hi_it - *lo_it);
    const double mid = 0.5 * (*hi_it + *lo_it);
    if (!(half > 1e-9)) throw NumericalError("no extrema: acceleration of vehicle " + std::to_string(vehicle) + " is flat");

    std::vector<Peak> peaks;
    for (std::size_t k = first + 1; k + 1 < ts.size(); ++k) {
        const double ap = a[k - 1];
        const double ak = a[k];
        const double an = a[k + 1];
        const bool is_max = ak > ap && ak >= an && ak - mid > 0.5 * half;
        const bool is_min = ak < ap && ak <= an && mid - ak > 0.5 * half;
        if (!is_max && !is_min) continue;
        const double denom = ap - 2.0 * ak + an;
        double delta = denom != 0.0 ? 0.5 * (ap - an) / denom : 0.0;
        delta = std::clamp(delta, -0.5, 0.5);
        const double step = 0.5 * (ts[k + 1] - ts[k - 1]);
        peaks.push_back(Peak{ts[k] + delta * step, is_max});
    }
    if (peaks.empty()) throw NumericalError("no extrema found for vehicle " + std::to_string(vehicle));
    return peaks;
}

}  // namespace

void SimConfig::validate(double phi_min, double omega_max) const {
    const double limit = std::min(phi_min, 2.0 * std::numbers::pi / omega_max) / 20.0;
    if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
        throw std::invalid_argument(fmt::format("step-size violation: dt = {} exceeds {}", dt, limit));
    }
    if (warmup_periods < 5) throw std::invalid_argument("warmup_periods must be >= 5");
    if (measure_periods < 2) throw std::invalid_argument("measure_periods must be >= 2");
    if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
    if (!std::isfinite(p0_origin)) throw std::invalid_argument("p0_origin must be finite");
}

Trajectory simulate_platoon(const PlatoonSpec& platoon, std::span<const OscComponent> input, const SimConfig& config) {
    platoon.validate();
    if (input.empty()) throw std::invalid_argument("simulate_platoon: no input components");
    double omega_min = input[0].omega;
    double omega_max = input[0].omega;
    double speed_amp = 0.0;
    for (const auto& c : input) {
        c.validate();
        omega_min = std::min(omega_min, c.omega);
        omega_max = std::max(omega_max, c.omega);
        speed_amp += c.speed_amplitude();
    }
    double phi_min = platoon.vehicles[0].phi;
    for (const auto& v : platoon.vehicles) phi_min = std::min(phi_min, v.phi);
    config.validate(phi_min, omega_max);
    if (platoon.bounds_enabled) {
        const double room = std::min(platoon.equilibrium.v_e, platoon.equilibrium.v_free - platoon.equilibrium.v_e);
        if (speed_amp > room * (1.0 + 1e-12)) {
            throw std::invalid_argument("leader speed oscillation leaves [0, v_free]");
        }
    }

    const double period = 2.0 * std::numbers::pi / omega_min;
    const double duration = (config.warmup_periods + config.measure_periods) * period;
    const auto steps = static_cast<std::size_t>(std::ceil(duration / config.dt - 1e-9));

    const std::size_t n = platoon.followers();
    std::vector<double> x(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        x[3 * i] = config.p0_origin - platoon.cumulative_spacing(i + 1);
        x[3 * i + 1] = platoon.equilibrium.v_e;
        x[3 * i + 2] = 0.0;
    }

    Trajectory traj;
    traj.vehicles.resize(n + 1);
    traj.steady_from = config.warmup_periods * period;
    const std::size_t expected = steps / config.record_stride + 2;
    traj.t.reserve(expected);
    for (auto& v : traj.vehicles) {
        v.position.reserve(expected);
        v.speed.reserve(expected);
        v.acceleration.reserve(expected);
    }

    const FollowerDynamics dyn(platoon, input, config.p0_origin);
    std::array<std::vector<double>, 5> work;
    for (auto& w : work) w.resize(x.size());

    const double v_e = platoon.equilibrium.v_e;
    record(traj, 0.0, leader_at(0.0, v_e, config.p0_origin, input), x);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * config.dt;
        rk4_step(dyn, t, config.dt, x, work);
        dyn.project(x);
        const double t_next = static_cast<double>(k + 1) * config.dt;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(std::abs(x[3 * i + 2]) <= kBlowUpAccel)) {
                throw NumericalError("numerical blow-up: " + at_time(i + 1, t_next));
            }
        }
        if ((k + 1) % config.record_stride == 0 || k + 1 == steps) {
            record(traj, t_next, leader_at(t_next, v_e, config.p0_origin, input), x);
        }
    }
    return traj;
}

Trajectory analytic_trajectory(const PlatoonSpec& platoon, std::span<const VehicleSpectrum> spectra,
                               std::span<const double> times, double p0_origin) {
    Trajectory traj;
    traj.t.assign(times.begin(), times.end());
    traj.vehicles.resize(spectra.size());
    traj.steady_from = times.empty() ? 0.0 : times.front();
    for (std::size_t i = 0; i < spectra.size(); ++i) {
        auto& v = traj.vehicles[i];
        for (const double t : times) {
            v.position.push_back(analytic_position(platoon, spectra, i, t, p0_origin));
            v.speed.push_back(analytic_speed(platoon, spectra, i, t));
            v.acceleration.push_back(analytic_acceleration(spectra, i, t));
        }
    }
    return traj;
}

HarmonicFit fit_first_harmonic(std::span<const double> t, std::span<const double> y, double omega, FitWindow window,
                               double steady_from) {
    if (t.size() != y.size()) throw std::invalid_argument("fit_first_harmonic: size mismatch");
    if (!(omega > 0.0)) throw std::invalid_argument("fit_first_harmonic: omega must be > 0");
    if (window.periods < 1) throw std::invalid_argument("fit_first_harmonic: window too short");
    const double slack = 1e-9 * std::max(1.0, std::abs(window.start));
    if (window.start < steady_from - slack) {
        throw std::invalid_argument("fit_first_harmonic: window overlaps warmup");
    }
    const double stop = window.start + window.periods * 2.0 * std::numbers::pi / omega;
    if (t.empty() || stop > t.back() + slack) throw std::invalid_argument("fit_first_harmonic: window runs past data");

    const auto lo = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), window.start - slack) - t.begin());
    const auto hi = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), stop + slack) - t.begin());
    if (hi < lo + 8) throw std::invalid_argument("fit_first_harmonic: too few samples in window");

    const auto rows = static_cast<Eigen::Index>(hi - lo);
    Eigen::MatrixXd design(rows, 3);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t k = lo + static_cast<std::size_t>(r);
        const double arg = omega * t[k];
        design(r, 0) = 1.0;
        design(r, 1) = std::sin(arg);
        design(r, 2) = std::cos(arg);
        rhs(r) = y[k];
    }
    const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
    return HarmonicFit{
        .amplitude = std::hypot(coef(1), coef(2)),
        .phase = std::atan2(coef(2), coef(1)),
        .offset = coef(0),
    };
}

FitWindow measurement_window(const Trajectory& traj, int periods) { return FitWindow{traj.steady_from, periods}; }

std::vector<WaveSample> empirical_wave_estimate(const Trajectory& traj, std::size_t pair) {
    if (pair == 0 || pair >= traj.vehicles.size()) throw std::out_of_range("empirical wave: pair out of range");

    std::vector<std::vector<Peak>> peaks(pair + 1);
    for (std::size_t k = 0; k <= pair; ++k) peaks[k] = acceleration_peaks(traj, k);

    // Last same-sign peak of `vehicle` strictly before t.
    const auto previous = [&](std::size_t vehicle, const Peak& ref) -> const Peak* {
        const Peak* best = nullptr;
        for (const auto& p : peaks[vehicle]) {
            if (p.t >= ref.t) break;
            if (p.is_max == ref.is_max) best = &p;
        }
        return best;
    };

    std::vector<WaveSample> out;
    for (const Peak& up : peaks[pair - 1]) {
        const auto down = std::find_if(peaks[pair].begin(), peaks[pair].end(),
                                       [&](const Peak& p) { return p.t > up.t && p.is_max == up.is_max; });
        if (down == peaks[pair].end()) continue;

        const Peak* origin = &up;
        for (std::size_t k = pair - 1; k > 0 && origin != nullptr; --k) origin = previous(k - 1, *origin);
        if (origin == nullptr) continue;

        WaveSample s;
        s.pair = pair;
        s.emission_time = origin->t;
        s.travel_time = down->t - up.t;
        s.shifted_distance = hermite_position(traj, pair - 1, up.t) - hermite_position(traj, pair, down->t);
        s.speed = s.shifted_distance / s.travel_time;
        s.flags = kWaveTraditional;
        out.push_back(s);
    }
    if (out.empty()) throw NumericalError("no extrema could be paired for pair " + std::to_string(pair));
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,vehicle,position,speed,acceleration\n";
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        for (std::size_t i = 0; i < traj.vehicles.size(); ++i) {
            const auto& v = traj.vehicles[i];
            fmt::print(out, "{:.9g},{},{:.9g},{:.9g},{:.9g}\n", traj.t[k], i, v.position[k], v.speed[k],
                       v.acceleration[k]);
        }
    }
}

}  // namespace avwave
