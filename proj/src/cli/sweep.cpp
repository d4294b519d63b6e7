#include "avwave/cli/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "avwave/cli/csv.hpp"
#include "avwave/freq.hpp"
#include "avwave/wave.hpp"

namespace avwave::cli {

namespace {

struct GridPoint {
    double value1 = 0.0;
    std::optional<double> value2;
};

std::vector<SweepRow> evaluate(const ExperimentConfig& base, const GridPoint& point) {
    ExperimentConfig c = base;
    apply_parameter(c, c.sweep.first.param, point.value1);
    if (c.sweep.second) apply_parameter(c, c.sweep.second->param, *point.value2);
    c.validate();

    const ControllerSpec spec = c.platoon().vehicle(c.frequency.vehicle);
    const LinearGains gains = linearize(spec);
    const double v_e = c.equilibrium.v_e;
    const double s_e = equilibrium_spacing(spec, v_e);
    const double speed_amplitude = c.input.front().speed_amplitude;

    std::vector<SweepRow> rows;
    for (const double omega : c.frequency.omegas()) {
        const FrequencyResponse r = transfer_at(gains, omega);
        const double travel = pair_wave_travel_time(r);
        const double amplitude = speed_amplitude / omega;
        rows.push_back(SweepRow{
            .param1 = point.value1,
            .param2 = point.value2,
            .omega = omega,
            .magnitude = r.magnitude,
            .phase = r.phase,
            .response_time = r.response_time,
            .wave_speed_mean = (s_e - v_e * travel) / travel,
            .wave_speed_amplitude = std::abs(amplitude * (1.0 - r.magnitude)) / travel,
        });
    }
    return rows;
}

}  // namespace

void apply_parameter(ExperimentConfig& config, const std::string& param, double value) {
    if (param == "k_s_per_s2") {
        config.controller.k_s = value;
    } else if (param == "k_v_per_s") {
        config.controller.k_v = value;
    } else if (param == "tau_s") {
        config.controller.tau = value;
    } else if (param == "phi_s") {
        config.controller.phi = value;
    } else if (param == "s_0_m") {
        config.controller.s_0 = value;
    } else if (param == "v_e_mps") {
        config.equilibrium.v_e = value;
    } else if (param == "speed_amplitude_mps") {
        for (auto& in : config.input) in.speed_amplitude = value;
    } else {
        throw ConfigError("unknown sweep parameter '" + param + "'");
    }
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, std::size_t workers) {
    config.validate();
    std::vector<GridPoint> grid;
    for (const double a : config.sweep.first.values) {
        if (config.sweep.second) {
            for (const double b : config.sweep.second->values) grid.push_back(GridPoint{a, b});
        } else {
            grid.push_back(GridPoint{a, std::nullopt});
        }
    }

    std::vector<std::vector<SweepRow>> results(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            try {
                results[k] = evaluate(config, grid[k]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(grid.size(), 1));
    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<SweepRow> rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.param1 != b.param1) return a.param1 < b.param1;
        if (a.param2 != b.param2) return a.param2 < b.param2;
        return a.omega < b.omega;
    });
    return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::string out = "param1,param2,omega,magnitude,phase,response_time,wave_speed_mean,wave_speed_amplitude\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_number(r.param1),
                           r.param2 ? csv_number(*r.param2) : std::string(), csv_number(r.omega),
                           csv_number(r.magnitude), csv_number(r.phase), csv_number(r.response_time),
                           csv_number(r.wave_speed_mean), csv_number(r.wave_speed_amplitude));
    }
    return out;
}

}  // namespace avwave::cli
