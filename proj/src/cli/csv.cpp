#include "avwave/cli/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace avwave::cli {

std::string csv_number(double v) { return fmt::format("{:.12g}", v); }

std::string frequency_response_csv(std::span<const FrequencyResponse> rows) {
    std::string out = "omega,magnitude,phase,response_time\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{}\n", csv_number(r.omega), csv_number(r.magnitude), csv_number(r.phase),
                           csv_number(r.response_time));
    }
    return out;
}

std::string wave_speed_csv(std::span<const WaveSample> rows) {
    std::string out = "pair,emission_time,travel_time,shifted_distance,speed,flags\n";
    for (const auto& s : rows) {
        out += fmt::format("{},{},{},{},{},{}\n", s.pair, csv_number(s.emission_time), csv_number(s.travel_time),
                           csv_number(s.shifted_distance), csv_number(s.speed), wave_flags_string(s.flags));
    }
    return out;
}

std::string spectrum_csv(std::span<const VehicleSpectrum> spectra) {
    std::string out = "vehicle,omega,amplitude,phase,stage_magnitude,stage_phase,boundary,approximate\n";
    for (const auto& v : spectra) {
        for (const auto& c : v.components) {
            out += fmt::format("{},{},{},{},{},{},{},{}\n", v.index, csv_number(c.omega), csv_number(c.amplitude),
                               csv_number(c.phase), csv_number(c.stage.magnitude), csv_number(c.stage.phase),
                               to_string(c.boundary), v.approximate ? 1 : 0);
        }
    }
    return out;
}

std::string dfa_csv(std::span<const DfaRow> rows) {
    std::string out = "omega,input_speed_amplitude,boundary,linear_magnitude,linear_phase,magnitude,phase\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n", csv_number(r.omega), csv_number(r.input_speed_amplitude),
                           to_string(r.boundary), csv_number(r.linear.magnitude), csv_number(r.linear.phase),
                           csv_number(r.describing.magnitude), csv_number(r.describing.phase));
    }
    return out;
}

std::vector<WaveSummaryRow> summarize_wave_series(std::span<const WaveSample> series) {
    std::vector<WaveSummaryRow> out;
    std::size_t begin = 0;
    while (begin < series.size()) {
        std::size_t end = begin;
        double lo = series[begin].speed;
        double hi = lo;
        double sum = 0.0;
        while (end < series.size() && series[end].pair == series[begin].pair) {
            lo = std::min(lo, series[end].speed);
            hi = std::max(hi, series[end].speed);
            sum += series[end].speed;
            ++end;
        }
        out.push_back(WaveSummaryRow{series[begin].pair, sum / static_cast<double>(end - begin), 0.5 * (hi - lo)});
        begin = end;
    }
    return out;
}

std::string wave_summary_csv(std::span<const WaveSummaryRow> rows) {
    std::string out = "pair,wave_speed_mean,wave_speed_amplitude\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{}\n", r.pair, csv_number(r.mean), csv_number(r.amplitude));
    }
    return out;
}

std::vector<StageFitRow> fit_stages(const Trajectory& traj, double omega, int measure_periods) {
    const FitWindow window = measurement_window(traj, measure_periods);
    std::vector<StageFitRow> out;
    HarmonicFit ahead{};
    for (std::size_t i = 0; i < traj.vehicles.size(); ++i) {
        const HarmonicFit fit = fit_first_harmonic(traj.t, traj.vehicles[i].speed, omega, window, traj.steady_from);
        StageFitRow row{i, omega, fit.amplitude, fit.phase, 1.0, 0.0};
        if (i > 0) {
            row.stage_ratio = ahead.amplitude > 0.0 ? fit.amplitude / ahead.amplitude : 0.0;
            row.stage_phase = std::remainder(fit.phase - ahead.phase, 2.0 * std::numbers::pi);
        }
        out.push_back(row);
        ahead = fit;
    }
    return out;
}

std::string stage_fit_csv(std::span<const StageFitRow> rows) {
    std::string out = "vehicle,omega,speed_amplitude,speed_phase,stage_ratio,stage_phase\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{}\n", r.vehicle, csv_number(r.omega), csv_number(r.speed_amplitude),
                           csv_number(r.speed_phase), csv_number(r.stage_ratio), csv_number(r.stage_phase));
    }
    return out;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    return std::move(os).str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace avwave::cli
