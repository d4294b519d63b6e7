#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "avwave/cli/config.hpp"
#include "avwave/cli/csv.hpp"
#include "avwave/cli/experiment.hpp"
#include "avwave/cli/sweep.hpp"
#include "support/oracle.hpp"

using namespace avwave;
using namespace avwave::cli;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

const char* const kBasic = R"(# basic analysis
[run]
name = basic
outputs = frequency_response, wave_speed

[controller]
k_s_per_s2 = 1
tau_s = 1.2

[platoon]
followers = 3

[input]
speed_amplitude_mps = 15
omega_rad_s = 0.5026548245743669
)";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path(AVWAVE_TEST_TMP) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int tool(const std::string& args) {
    const std::string cmd = std::string("\"") + AVWAVE_TOOL + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::vector<std::string> sorted_listing(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) names.push_back(fs::relative(e.path(), dir).string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("parse a basic config") {
    const auto c = parse(kBasic);
    CHECK(c.name == "basic");
    CHECK(c.mode == "analysis");
    CHECK(c.outputs == std::vector<std::string>{"frequency_response", "wave_speed"});
    CHECK(c.controller.k_v == 1.0);
    CHECK(c.followers == 3);
    REQUIRE(c.input.size() == 1);
    CHECK(c.input[0].speed_amplitude == 15.0);
    CHECK_NOTHROW(c.validate());
    CHECK(c.platoon().followers() == 3);
    CHECK(c.components()[0].amplitude == doctest::Approx(15.0 / 0.5026548245743669).epsilon(1e-15));

    const auto hz = parse("[input]\nspeed_amplitude_mps = 1, 2\nfrequency_hz = 0.05, 0.1\nphase_rad = 0, 0.5\n");
    REQUIRE(hz.input.size() == 2);
    CHECK(hz.input[0].omega == doctest::Approx(2.0 * std::numbers::pi * 0.05).epsilon(1e-15));
    CHECK(hz.input[1].phase == 0.5);
}

TEST_CASE("parse errors carry line numbers") {
    const auto line_of = [](const std::string& text) {
        try {
            parse(text);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).starts_with("line " + std::to_string(e.line()) + ": "));
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("[controller]\nk_s_per_s2 = 1\nk_v_per_s = fast\n") == 3);
    CHECK(line_of("[controller]\nk_s_per_s2 = 1x\n") == 2);
    CHECK(line_of("[controller]\nk_s = 1\n") == 2);
    CHECK(line_of("[run]\nname = a\n[warp]\nx = 1\n") == 3);
    CHECK(line_of("[run]\nname = a\nname = b\n") == 3);
    CHECK(line_of("[run]\n[run]\n") == 2);
    CHECK(line_of("k = 1\n") == 1);
    CHECK(line_of("[run\n") == 1);
    CHECK(line_of("[platoon]\nfollowers = 2.5\n") == 2);
    CHECK(line_of("[platoon]\nbounds_enabled = maybe\n") == 2);
    CHECK(line_of("[run]\noutputs = everything\n") == 2);
    CHECK(line_of("[input]\nspeed_amplitude_mps = 1\nomega_rad_s = 1\nfrequency_hz = 1\n") > 0);
    CHECK(line_of("[input]\nspeed_amplitude_mps = 1, 2\nomega_rad_s = 1\n") > 0);
    CHECK(line_of("[sweep]\nvalues1 = 1,,2\n") == 2);
}

TEST_CASE("validation errors") {
    auto c = parse(kBasic);
    c.controller.tau = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(parse("[platoon]\nfollowers = 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("[run]\nmode = poetry\n[input]\nspeed_amplitude_mps = 1\nomega_rad_s = 1\n").validate(),
                    ConfigError);
    CHECK_THROWS_AS(parse("[input]\nspeed_amplitude_mps = 1, 1\nomega_rad_s = 1, 1\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("[platoon]\nfollowers = 2\n[vehicle.3]\nk_s_per_s2 = 1\n[input]\n"
                          "speed_amplitude_mps = 1\nomega_rad_s = 1\n")
                        .validate(),
                    ConfigError);

    const std::string sweep_base = "[run]\nmode = sweep\n[input]\nspeed_amplitude_mps = 1\nomega_rad_s = 1\n";
    try {
        parse(sweep_base + "[sweep]\nparam1 = tau_s\nvalues1 =\n").validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("empty sweep range") != std::string::npos);
    }
    CHECK_THROWS_AS(parse(sweep_base + "[sweep]\nparam1 = color\nvalues1 = 1\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse(sweep_base + "[sweep]\nparam1 = tau_s\nvalues1 = 1\nparam2 = tau_s\nvalues2 = 1\n").validate(),
                    ConfigError);

    const std::string dfa_base = "[run]\nmode = dfa_study\n[input]\nspeed_amplitude_mps = 1\nomega_rad_s = 1\n";
    CHECK_THROWS_AS(parse(dfa_base + "[dfa]\nratios = 1.2\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse(dfa_base).validate(), ConfigError);
    CHECK_NOTHROW(parse(dfa_base + "[dfa]\nratios = 0.5, 1\n").validate());
    CHECK_THROWS_AS(parse("[run]\noutputs = stage_fit\n[input]\nspeed_amplitude_mps = 1, 2\nomega_rad_s = 1, 2\n")
                        .validate(),
                    ConfigError);
}

TEST_CASE("render and parse round-trip") {
    auto c = parse(kBasic);
    c.controller.phi = 0.1 + 0.2;
    c.equilibrium.v_e = 1.0 / 3.0;
    ControllerSpec other;
    other.k_v = 0.2;
    c.overrides[2] = other;
    c.input.push_back(InputSpec{0.7, std::numbers::pi / 7.0, -0.3});
    c.wave.pairs = {1, 3};
    c.sim.record_stride = 3;
    c.sweep.first = SweepAxis{"k_s_per_s2", {0.2, 0.6}};
    c.sweep.second = SweepAxis{"tau_s", {0.6, 1.0 / 7.0}};
    c.dfa_ratios = {0.8, 0.9};
    const std::string text = render_config(c);
    const auto back = parse(text);
    CHECK(render_config(back) == text);
    CHECK(back.controller.phi == c.controller.phi);
    CHECK(back.equilibrium.v_e == c.equilibrium.v_e);
    CHECK(back.overrides.at(2).k_v == 0.2);
    CHECK(back.input[1].omega == c.input[1].omega);
    CHECK(back.sweep.second->values[1] == 1.0 / 7.0);
    CHECK(back.platoon().vehicle(2).k_v == 0.2);
    CHECK(back.platoon().vehicle(1).k_v == 1.0);
}

TEST_CASE("csv rendering") {
    CHECK(csv_number(0.1) == "0.1");
    CHECK(csv_number(1.0 / 3.0) == "0.333333333333");
    const std::vector<FrequencyResponse> rows{make_response(1.0, 0.5, -0.25)};
    CHECK(frequency_response_csv(rows) == "omega,magnitude,phase,response_time\n1,0.5,-0.25,0.25\n");

    std::vector<WaveSample> series;
    for (int k = 0; k < 5; ++k) series.push_back(WaveSample{.pair = 2, .speed = 3.0 + (k % 2 == 0 ? 1.0 : -1.0)});
    series.push_back(WaveSample{.pair = 1, .speed = 7.0});
    const auto summary = summarize_wave_series(series);
    REQUIRE(summary.size() == 2);
    CHECK(summary[0].pair == 2);
    CHECK(summary[0].amplitude == 1.0);
    CHECK(summary[1].amplitude == 0.0);
    CHECK(wave_summary_csv(summary).starts_with("pair,wave_speed_mean,wave_speed_amplitude\n"));

    const auto dir = scratch("atomic");
    write_file_atomic(dir / "a.csv", "x\n");
    CHECK(read_text(dir / "a.csv") == "x\n");
    CHECK(sorted_listing(dir) == std::vector<std::string>{"a.csv"});
}

TEST_CASE("sweep rows are sorted and independent of the worker count") {
    auto c = parse(kBasic);
    c.mode = "sweep";
    c.frequency.points = 30;
    c.sweep.first = SweepAxis{"tau_s", {1.4, 0.6, 1.0}};
    c.sweep.second = SweepAxis{"k_v_per_s", {0.2, 1.0}};
    c.validate();
    const auto one = run_sweep(c, 1);
    const auto many = run_sweep(c, 4);
    REQUIRE(one.size() == 3 * 2 * 30);
    CHECK(sweep_csv(one) == sweep_csv(many));
    for (std::size_t k = 1; k < one.size(); ++k) {
        const auto& a = one[k - 1];
        const auto& b = one[k];
        const bool ordered = a.param1 < b.param1 || (a.param1 == b.param1 && *a.param2 < *b.param2) ||
                             (a.param1 == b.param1 && *a.param2 == *b.param2 && a.omega < b.omega);
        CHECK(ordered);
    }

    c.sweep.second.reset();
    const auto single = sweep_csv(run_sweep(c, 2));
    const auto table = read_csv(single);
    CHECK(table[0][1] == "param2");
    CHECK(table[1][1].empty());
}

TEST_CASE("sweep trends") {
    auto c = parse(kBasic);
    c.mode = "sweep";
    c.frequency = FrequencyGrid{1e-3, 10.0, 200, 1};
    c.sweep.first = SweepAxis{"tau_s", {0.6, 0.8, 1.0, 1.2, 1.4}};
    const auto rows = run_sweep(c, 2);
    double prev_wave = std::numeric_limits<double>::infinity();
    for (const double tau : c.sweep.first.values) {
        const auto low = std::find_if(rows.begin(), rows.end(), [&](const SweepRow& r) { return r.param1 == tau; });
        REQUIRE(low != rows.end());
        CHECK(low->response_time == doctest::Approx(tau).epsilon(1e-4));
        CHECK(low->wave_speed_mean < prev_wave);
        prev_wave = low->wave_speed_mean;
    }

    c.sweep.first = SweepAxis{"k_v_per_s", {0.2, 1.0}};
    const auto kv = run_sweep(c, 2);
    double sup_weak = 0.0;
    double sup_strong = 0.0;
    for (const auto& r : kv) {
        double& sup = r.param1 == 0.2 ? sup_weak : sup_strong;
        sup = std::max(sup, r.magnitude);
    }
    CHECK(sup_weak > 1.0);
    CHECK(sup_strong <= 1.0);

    c.sweep.first = SweepAxis{"k_s_per_s2", {0.2, 1.4}};
    const auto ks = run_sweep(c, 1);
    const auto high = [&](double k) {
        return std::find_if(ks.rbegin(), ks.rend(), [&](const SweepRow& r) { return r.param1 == k; })->magnitude;
    };
    CHECK(high(1.4) > high(0.2));

    ExperimentConfig bad = c;
    CHECK_THROWS_AS(apply_parameter(bad, "colour", 1.0), ConfigError);
    apply_parameter(bad, "speed_amplitude_mps", 3.0);
    CHECK(bad.input[0].speed_amplitude == 3.0);
}

TEST_CASE("render outputs") {
    auto c = parse(kBasic);
    const auto files = render_outputs(c, RunOptions{});
    REQUIRE(files.size() == 3);
    CHECK(files[0].name == "config.ini");
    CHECK(files[1].name == "frequency_response.csv");
    CHECK(files[2].name == "wave_speed.csv");
    const std::vector<std::string> only{"spectrum"};
    const auto narrowed = render_outputs(c, RunOptions{}, only);
    REQUIRE(narrowed.size() == 2);
    CHECK(narrowed[1].name == "spectrum.csv");
    CHECK(parse(narrowed[0].content).outputs == only);

    CHECK(preset_names() == std::vector<std::string>{"fig4", "fig5-10", "fig11", "fig12"});
    CHECK_THROWS_AS(preset("fig99"), ConfigError);
    for (const auto& name : preset_names()) {
        for (const auto& run : preset(name)) CHECK_NOTHROW(run.config.validate());
    }
    CHECK(preset("fig12", 0.5)[0].config.input[0].omega == 0.5);
}

TEST_CASE("tool exit codes") {
    const auto dir = scratch("exit");
    write_text(dir / "ok.ini", kBasic);
    CHECK(tool("freq-response --config \"" + (dir / "ok.ini").string() + "\" --out \"" + (dir / "ok").string() + "\"") == 0);
    CHECK(fs::exists(dir / "ok" / "frequency_response.csv"));
    CHECK(fs::exists(dir / "ok" / "config.ini"));
    CHECK(!fs::exists(dir / "ok" / "wave_speed.csv"));

    CHECK(tool("--help") == 0);
    CHECK(tool("") == 2);
    CHECK(tool("freq-response") == 2);
    CHECK(tool("freq-response --bogus") == 2);
    CHECK(tool("experiment fig99 --out \"" + (dir / "none").string() + "\"") == 2);

    write_text(dir / "typo.ini", "[controller]\nk_s = 1\n");
    CHECK(tool("platoon --config \"" + (dir / "typo.ini").string() + "\" --out \"" + (dir / "typo").string() + "\"") == 2);
    CHECK(!fs::exists(dir / "typo"));

    write_text(dir / "empty.ini", std::string(kBasic) + "[sweep]\nparam1 = tau_s\nvalues1 =\n");
    CHECK(tool("sweep --config \"" + (dir / "empty.ini").string() + "\" --out \"" + (dir / "empty").string() + "\"") == 2);
    CHECK(!fs::exists(dir / "empty" / "sweep.csv"));

    write_text(dir / "unstable.ini",
               "[controller]\nk_s_per_s2 = 1.4\nk_v_per_s = 0.01\ntau_s = 0.01\nphi_s = 0.5\n"
               "[input]\nspeed_amplitude_mps = 1\nomega_rad_s = 1\n");
    CHECK(tool("simulate --config \"" + (dir / "unstable.ini").string() + "\" --out \"" + (dir / "unstable").string() +
               "\"") == 3);
    CHECK(!fs::exists(dir / "unstable" / "trajectory.csv"));
}

TEST_CASE("presets are byte-deterministic and their config echo reproduces them") {
    const auto dir = scratch("preset");
    REQUIRE(tool("experiment fig12 --out \"" + (dir / "a").string() + "\"") == 0);
    REQUIRE(tool("experiment fig12 --out \"" + (dir / "b").string() + "\"") == 0);
    const auto names = sorted_listing(dir / "a");
    CHECK(names == sorted_listing(dir / "b"));
    CHECK(std::find(names.begin(), names.end(), "dfa_study.csv") != names.end());
    for (const auto& n : names) CHECK(read_text(dir / "a" / n) == read_text(dir / "b" / n));

    REQUIRE(tool("experiment --config \"" + (dir / "a" / "config.ini").string() + "\" --out \"" + (dir / "c").string() +
                 "\"") == 0);
    CHECK(sorted_listing(dir / "c") == names);
    for (const auto& n : names) CHECK(read_text(dir / "a" / n) == read_text(dir / "c" / n));

    const auto table = read_csv(read_text(dir / "a" / "dfa_study.csv"));
    REQUIRE(table.size() == 4);
    CHECK(table[1][3] == "inactive");
    CHECK(table[3][3] == "both");
    for (std::size_t col = 4; col < table[0].size(); ++col) CHECK(table[1][col] == table[2][col]);
    CHECK(table[3][6] != table[1][6]);
}

TEST_CASE("wave subcommand writes both wave files") {
    const auto dir = scratch("wave");
    write_text(dir / "w.ini", kBasic);
    REQUIRE(tool("wave --config \"" + (dir / "w.ini").string() + "\" --out \"" + (dir / "o").string() + "\"") == 0);
    CHECK(sorted_listing(dir / "o") == std::vector<std::string>{"config.ini", "wave_speed.csv", "wave_summary.csv"});
    const auto summary = read_csv(read_text(dir / "o" / "wave_summary.csv"));
    REQUIRE(summary.size() == 4);
    CHECK(std::stod(summary[1][1]) == doctest::Approx(oracle::kWaveMean).epsilon(1e-10));
}

}  // TEST_SUITE
