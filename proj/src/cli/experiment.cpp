#include "avwave/cli/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "avwave/cli/csv.hpp"
#include "avwave/cli/sweep.hpp"
#include "avwave/dfa.hpp"
#include "avwave/freq.hpp"
#include "avwave/platoon.hpp"
#include "avwave/sim.hpp"
#include "avwave/wave.hpp"

namespace avwave::cli {

namespace {

bool wants(std::span<const std::string> outputs, const char* name) {
    return std::find(outputs.begin(), outputs.end(), name) != outputs.end();
}

double slowest_omega(const ExperimentConfig& c) {
    double w = c.input.front().omega;
    for (const auto& in : c.input) w = std::min(w, in.omega);
    return w;
}

std::vector<double> wave_time_grid(const ExperimentConfig& c) {
    const double period = 2.0 * std::numbers::pi / slowest_omega(c);
    const double start = c.wave.t_start;
    const double end = c.wave.t_end != 0.0 ? c.wave.t_end : start + 2.0 * period;
    const double step = c.wave.t_step > 0.0 ? c.wave.t_step : period / 40.0;
    const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9));
    std::vector<double> grid;
    grid.reserve(count + 1);
    for (std::size_t k = 0; k <= count; ++k) grid.push_back(start + static_cast<double>(k) * step);
    return grid;
}

std::vector<std::size_t> wave_pairs(const ExperimentConfig& c) {
    if (!c.wave.pairs.empty()) return c.wave.pairs;
    std::vector<std::size_t> pairs;
    for (std::size_t i = 1; i <= c.followers; ++i) pairs.push_back(i);
    return pairs;
}

std::vector<OutputFile> render_analysis(const ExperimentConfig& c, std::span<const std::string> outputs) {
    const PlatoonSpec platoon = c.platoon();
    const std::vector<OscComponent> comps = c.components();
    std::vector<OutputFile> files;

    if (wants(outputs, "frequency_response")) {
        const auto grid = c.frequency.omegas();
        const auto rows = frequency_sweep(linearize(platoon.vehicle(c.frequency.vehicle)), grid);
        files.push_back({"frequency_response.csv", frequency_response_csv(rows)});
    }

    const bool need_spectra = wants(outputs, "spectrum") || wants(outputs, "dfa") || wants(outputs, "wave_speed") ||
                              wants(outputs, "wave_summary");
    std::vector<VehicleSpectrum> spectra;
    if (need_spectra) spectra = propagate_spectrum(platoon, comps);

    if (wants(outputs, "spectrum")) files.push_back({"spectrum.csv", spectrum_csv(spectra)});

    if (wants(outputs, "dfa")) {
        const std::size_t v = c.frequency.vehicle;
        const LinearGains gains = linearize(platoon.vehicle(v));
        const SpeedBounds bounds = platoon.bounds();
        std::vector<DfaRow> rows;
        for (const auto& up : spectra[v - 1].components) {
            const double amp = up.amplitude * up.omega;
            const FrequencyResponse linear = transfer_at(gains, up.omega);
            rows.push_back(DfaRow{up.omega, amp, classify_boundary_case(linear, amp, bounds), linear,
                                  describing_transfer(linear, amp, bounds)});
        }
        files.push_back({"dfa.csv", dfa_csv(rows)});
    }

    if (wants(outputs, "wave_speed") || wants(outputs, "wave_summary")) {
        const auto grid = wave_time_grid(c);
        const auto pairs = wave_pairs(c);
        const auto series = wave_speed_series(platoon, spectra, pairs, grid);
        if (wants(outputs, "wave_speed")) files.push_back({"wave_speed.csv", wave_speed_csv(series)});
        if (wants(outputs, "wave_summary")) {
            files.push_back({"wave_summary.csv", wave_summary_csv(summarize_wave_series(series))});
        }
    }

    if (wants(outputs, "trajectory") || wants(outputs, "stage_fit")) {
        const Trajectory traj = simulate_platoon(platoon, comps, c.sim);
        if (wants(outputs, "trajectory")) files.push_back({"trajectory.csv", trajectory_csv(traj)});
        if (wants(outputs, "stage_fit")) {
            files.push_back({"stage_fit.csv", stage_fit_csv(fit_stages(traj, comps.front().omega,
                                                                       c.sim.measure_periods))});
        }
    }
    return files;
}

std::vector<OutputFile> render_dfa_study(const ExperimentConfig& c, std::span<const std::string> outputs) {
    std::string table =
        "ratio,input_speed_amplitude,omega,boundary,linear_magnitude,linear_phase,magnitude,phase,sim_magnitude,"
        "sim_phase\n";
    std::vector<OutputFile> files;
    const double v_bound = std::min(c.equilibrium.v_e, c.equilibrium.v_free - c.equilibrium.v_e);
    for (const double ratio : c.dfa_ratios) {
        ExperimentConfig run = c;
        apply_parameter(run, "speed_amplitude_mps", ratio * v_bound);
        const PlatoonSpec platoon = run.platoon();
        const std::vector<OscComponent> comps = run.components();
        const double omega = comps.front().omega;
        const double amp = run.input.front().speed_amplitude;

        const FrequencyResponse linear = transfer_at(linearize(platoon.vehicle(1)), omega);
        const SpeedBounds bounds = platoon.bounds();
        const FrequencyResponse nl = describing_transfer(linear, amp, bounds);
        const BoundaryCase boundary = classify_boundary_case(linear, amp, bounds);

        const Trajectory traj = simulate_platoon(platoon, comps, run.sim);
        const auto fits = fit_stages(traj, omega, run.sim.measure_periods);

        table += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", csv_number(ratio), csv_number(amp), csv_number(omega),
                             to_string(boundary), csv_number(linear.magnitude), csv_number(linear.phase),
                             csv_number(nl.magnitude), csv_number(nl.phase), csv_number(fits[1].stage_ratio),
                             csv_number(fits[1].stage_phase));
        if (wants(outputs, "trajectory")) {
            files.push_back({fmt::format("trajectory_ratio_{}.csv", csv_number(ratio)), trajectory_csv(traj)});
        }
    }
    files.insert(files.begin(), OutputFile{"dfa_study.csv", table});
    return files;
}

ExperimentConfig base_preset(const std::string& name, std::size_t followers, double speed_amplitude, double omega) {
    ExperimentConfig c;
    c.name = name;
    c.followers = followers;
    c.input = {InputSpec{speed_amplitude, omega, 0.0}};
    c.sim.record_stride = 10;
    return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig4", "fig5-10", "fig11", "fig12"}; }

std::vector<PresetRun> preset(const std::string& name, std::optional<double> omega_override) {
    std::vector<PresetRun> runs;
    if (name == "fig4") {
        ExperimentConfig c = base_preset("fig4", 10, 15.0, 0.16 * std::numbers::pi);
        c.frequency.omega_min = 1e-2;
        c.outputs = {"frequency_response", "spectrum", "wave_speed", "wave_summary", "trajectory"};
        runs.push_back({"", c});
    } else if (name == "fig5-10") {
        const std::vector<std::pair<std::string, std::vector<double>>> axes{
            {"k_s_per_s2", {0.2, 0.6, 1.0, 1.4}},
            {"k_v_per_s", {0.2, 0.6, 1.0, 1.4}},
            {"tau_s", {0.6, 0.8, 1.0, 1.2, 1.4}},
        };
        for (const auto& [param, values] : axes) {
            ExperimentConfig c = base_preset("fig5-10", 1, 15.0, 0.16 * std::numbers::pi);
            c.mode = "sweep";
            c.outputs.clear();
            c.sweep.first = SweepAxis{param, values};
            runs.push_back({param, c});
        }
    } else if (name == "fig11") {
        for (const double k_v : {0.2, 1.0}) {
            ExperimentConfig c = base_preset("fig11", 4, 15.0, 2.0 * std::numbers::pi * 0.05);
            c.controller.k_v = k_v;
            c.frequency.omega_min = 1e-2;
            c.outputs = {"frequency_response", "spectrum", "wave_speed", "wave_summary", "trajectory", "stage_fit"};
            runs.push_back({fmt::format("k_v_{:.1f}", k_v), c});
        }
    } else if (name == "fig12") {
        ExperimentConfig c = base_preset("fig12", 1, 10.0, 1.0);
        c.mode = "dfa_study";
        c.equilibrium = Equilibrium{10.0, 20.0};
        c.controller.tau = 0.5;
        c.bounds_enabled = true;
        c.dfa_ratios = {0.8, 0.9, 1.0};
        c.outputs = {"trajectory"};
        runs.push_back({"", c});
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    if (omega_override) {
        for (auto& r : runs) {
            for (auto& in : r.config.input) in.omega = *omega_override;
        }
    }
    for (const auto& r : runs) r.config.validate();
    return runs;
}

std::vector<OutputFile> render_outputs(const ExperimentConfig& config, const RunOptions& options,
                                       std::span<const std::string> outputs) {
    ExperimentConfig c = config;
    if (!outputs.empty()) c.outputs.assign(outputs.begin(), outputs.end());
    c.validate();
    std::vector<OutputFile> files;
    if (c.mode == "sweep") {
        const auto rows = run_sweep(c, options.workers);
        files.push_back({"sweep.csv", sweep_csv(rows)});
    } else if (c.mode == "dfa_study") {
        files = render_dfa_study(c, c.outputs);
    } else {
        files = render_analysis(c, c.outputs);
    }
    files.insert(files.begin(), OutputFile{"config.ini", render_config(c)});
    return files;
}

std::vector<std::filesystem::path> run_config(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                              const RunOptions& options, std::span<const std::string> outputs) {
    const auto files = render_outputs(config, options, outputs);
    std::vector<std::filesystem::path> written;
    for (const auto& f : files) {
        written.push_back(out_dir / f.name);
        write_file_atomic(written.back(), f.content);
    }
    return written;
}

std::vector<std::filesystem::path> run_preset(const std::string& name, const std::filesystem::path& out_dir,
                                              const RunOptions& options, std::optional<double> omega_override) {
    std::vector<std::pair<std::filesystem::path, std::vector<OutputFile>>> rendered;
    for (const auto& run : preset(name, omega_override)) {
        const auto dir = run.subdir.empty() ? out_dir : out_dir / run.subdir;
        rendered.emplace_back(dir, render_outputs(run.config, options));
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [dir, files] : rendered) {
        for (const auto& f : files) {
            written.push_back(dir / f.name);
            write_file_atomic(written.back(), f.content);
        }
    }
    return written;
}

}  // namespace avwave::cli
