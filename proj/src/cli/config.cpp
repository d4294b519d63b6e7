#include "avwave/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "avwave/freq.hpp"

namespace avwave::cli {

namespace {

const std::set<std::string> kOutputs{"frequency_response", "spectrum", "dfa", "wave_speed",
                                     "wave_summary", "trajectory", "stage_fit"};
const std::set<std::string> kModes{"analysis", "sweep", "dfa_study"};
const std::set<std::string> kSweepParams{"k_s_per_s2", "k_v_per_s", "tau_s", "phi_s",
                                         "s_0_m", "v_e_mps", "speed_amplitude_mps"};

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct Section {
    int line = 0;
    std::map<std::string, Entry> entries;
};

using Document = std::map<std::string, Section>;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

Document parse_document(std::istream& in) {
    Document doc;
    Section* current = nullptr;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto comment = raw.find_first_of("#;");
        const std::string text = trim(std::string_view(raw).substr(0, comment));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') throw ConfigError("unterminated section header", line);
            const std::string name = trim(std::string_view(text).substr(1, text.size() - 2));
            if (name.empty()) throw ConfigError("empty section name", line);
            if (doc.contains(name)) throw ConfigError("duplicate section [" + name + "]", line);
            current = &doc[name];
            current->line = line;
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line);
        if (current == nullptr) throw ConfigError("key outside of any section", line);
        const std::string key = trim(std::string_view(text).substr(0, eq));
        if (key.empty()) throw ConfigError("missing key before '='", line);
        auto [it, inserted] = current->entries.emplace(key, Entry{trim(std::string_view(text).substr(eq + 1)), line});
        if (!inserted) throw ConfigError("duplicate key '" + key + "'", line);
    }
    return doc;
}

double to_double(const Entry& e, const std::string& key) {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ConfigError("'" + key + "': expected a number, got '" + e.value + "'", e.line);
    }
    return v;
}

long long to_integer(const Entry& e, const std::string& key) {
    long long v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("'" + key + "': expected an integer, got '" + e.value + "'", e.line);
    }
    return v;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    if (trim(value).empty()) return out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

class Reader {
public:
    Reader(Section* section, std::string name) : section_(section), name_(std::move(name)) {}

    bool present() const { return section_ != nullptr; }

    Entry* find(const std::string& key) {
        if (section_ == nullptr) return nullptr;
        auto it = section_->entries.find(key);
        if (it == section_->entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    void number(const std::string& key, double& out) {
        if (Entry* e = find(key)) out = to_double(*e, key);
    }

    template <class Int>
    void integer(const std::string& key, Int& out, long long min_value) {
        if (Entry* e = find(key)) {
            const long long v = to_integer(*e, key);
            if (v < min_value) throw ConfigError(fmt::format("'{}' must be >= {}", key, min_value), e->line);
            out = static_cast<Int>(v);
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (Entry* e = find(key)) {
            if (e->value == "true") {
                out = true;
            } else if (e->value == "false") {
                out = false;
            } else {
                throw ConfigError("'" + key + "': expected true or false", e->line);
            }
        }
    }

    void text(const std::string& key, std::string& out) {
        if (Entry* e = find(key)) out = e->value;
    }

    bool numbers(const std::string& key, std::vector<double>& out) {
        Entry* e = find(key);
        if (e == nullptr) return false;
        out.clear();
        for (const auto& item : split_list(e->value)) {
            if (item.empty()) throw ConfigError("'" + key + "': empty list element", e->line);
            out.push_back(to_double(Entry{item, e->line}, key));
        }
        return true;
    }

    void finish() const {
        if (section_ == nullptr) return;
        for (const auto& [key, e] : section_->entries) {
            if (!e.used) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]", e.line);
        }
    }

private:
    Section* section_;
    std::string name_;
};

Reader reader(Document& doc, const std::string& name) {
    auto it = doc.find(name);
    return Reader(it == doc.end() ? nullptr : &it->second, name);
}

void read_controller(Reader& r, ControllerSpec& spec) {
    r.number("k_s_per_s2", spec.k_s);
    r.number("k_v_per_s", spec.k_v);
    r.number("tau_s", spec.tau);
    r.number("phi_s", spec.phi);
    r.number("s_0_m", spec.s_0);
}

std::string num(double v) { return fmt::format("{}", v); }

template <class Range, class F>
std::string join(const Range& values, F&& format) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) out += ", ";
        out += format(v);
    }
    return out;
}

void write_controller(std::string& out, const ControllerSpec& c) {
    out += fmt::format("k_s_per_s2 = {}\nk_v_per_s = {}\ntau_s = {}\nphi_s = {}\ns_0_m = {}\n", num(c.k_s),
                       num(c.k_v), num(c.tau), num(c.phi), num(c.s_0));
}

template <class F>
void guarded(const std::string& what, F&& check) {
    try {
        check();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, message) : message), line_(line) {}

std::vector<double> FrequencyGrid::omegas() const {
    return log_grid(omega_min, omega_max, static_cast<std::size_t>(points));
}

PlatoonSpec ExperimentConfig::platoon() const {
    PlatoonSpec p = PlatoonSpec::homogeneous(controller, followers, equilibrium, bounds_enabled);
    for (const auto& [i, spec] : overrides) {
        if (i >= 1 && i <= followers) p.vehicles[i - 1] = spec;
    }
    return p;
}

std::vector<OscComponent> ExperimentConfig::components() const {
    std::vector<OscComponent> out;
    out.reserve(input.size());
    for (const auto& in : input) {
        out.push_back(OscComponent::from_speed_amplitude(in.speed_amplitude, in.omega, in.phase));
    }
    return out;
}

bool is_output_name(const std::string& name) { return kOutputs.contains(name); }

void ExperimentConfig::validate() const {
    if (name.empty() || name.find_first_of("\n#;") != std::string::npos) {
        throw ConfigError("[run] name must be non-empty text");
    }
    if (!kModes.contains(mode)) throw ConfigError("[run] unknown mode '" + mode + "'");
    for (const auto& o : outputs) {
        if (!is_output_name(o)) throw ConfigError("[run] unknown output '" + o + "'");
    }
    if (followers < 1) throw ConfigError("[platoon] followers must be >= 1");
    for (const auto& [i, spec] : overrides) {
        if (i < 1 || i > followers) throw ConfigError(fmt::format("[vehicle.{}] is beyond the platoon", i));
    }
    if (input.empty()) throw ConfigError("[input] needs at least one oscillation component");
    guarded("[controller]", [&] { controller.validate(); });
    guarded("[equilibrium]", [&] { equilibrium.validate(); });
    const PlatoonSpec p = platoon();
    guarded("platoon", [&] { p.validate(); });
    const auto comps = components();
    double omega_max = 0.0;
    for (std::size_t m = 0; m < comps.size(); ++m) {
        guarded("[input]", [&] { comps[m].validate(); });
        for (std::size_t k = 0; k < m; ++k) {
            if (comps[k].omega == comps[m].omega) throw ConfigError("[input] frequencies must be distinct");
        }
        omega_max = std::max(omega_max, comps[m].omega);
    }
    double phi_min = p.vehicles.front().phi;
    for (const auto& v : p.vehicles) phi_min = std::min(phi_min, v.phi);
    guarded("[sim]", [&] { sim.validate(phi_min, omega_max); });

    if (!(frequency.omega_min > 0.0) || !(frequency.omega_max > frequency.omega_min) || frequency.points < 2) {
        throw ConfigError("[frequency] needs 0 < omega_min < omega_max and points >= 2");
    }
    if (frequency.vehicle < 1 || frequency.vehicle > followers) {
        throw ConfigError("[frequency] vehicle must name a follower");
    }
    for (const auto i : wave.pairs) {
        if (i < 1 || i > followers) throw ConfigError(fmt::format("[wave] pair {} does not exist", i));
    }
    if (wave.t_step < 0.0 || (wave.t_end != 0.0 && !(wave.t_end > wave.t_start))) {
        throw ConfigError("[wave] needs t_end > t_start and t_step >= 0");
    }

    if (mode == "sweep") {
        const auto check_axis = [](const SweepAxis& a, const char* which) {
            if (!kSweepParams.contains(a.param)) {
                throw ConfigError(fmt::format("[sweep] {}: unknown parameter '{}'", which, a.param));
            }
            if (a.values.empty()) throw ConfigError(fmt::format("[sweep] {}: empty sweep range", which));
        };
        check_axis(sweep.first, "param1");
        std::size_t grid = sweep.first.values.size();
        if (sweep.second) {
            check_axis(*sweep.second, "param2");
            if (sweep.second->param == sweep.first.param) throw ConfigError("[sweep] param1 and param2 coincide");
            grid *= sweep.second->values.size();
        }
        if (grid > 1'000'000) throw ConfigError("[sweep] grid exceeds 10^6 points");
    }
    if (mode == "dfa_study") {
        if (dfa_ratios.empty()) throw ConfigError("[dfa] ratios must not be empty");
        for (const double r : dfa_ratios) {
            if (!(r > 0.0) || r > 1.0) throw ConfigError("[dfa] ratios must lie in (0, 1]");
        }
        if (input.size() != 1) throw ConfigError("dfa_study needs exactly one input component");
    }
    if (std::find(outputs.begin(), outputs.end(), "stage_fit") != outputs.end() && input.size() != 1) {
        throw ConfigError("stage_fit output needs exactly one input component");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    Document doc = parse_document(in);
    ExperimentConfig c;

    for (const auto& [name, section] : doc) {
        static const std::set<std::string> known{"run",       "controller", "equilibrium", "platoon", "input",
                                                 "frequency", "wave",       "sim",         "sweep",   "dfa"};
        if (!known.contains(name) && !name.starts_with("vehicle.")) {
            throw ConfigError("unknown section [" + name + "]", section.line);
        }
    }

    {
        Reader r = reader(doc, "run");
        r.text("name", c.name);
        r.text("mode", c.mode);
        if (Entry* e = r.find("outputs")) {
            c.outputs = split_list(e->value);
            for (const auto& o : c.outputs) {
                if (!is_output_name(o)) throw ConfigError("unknown output '" + o + "'", e->line);
            }
        }
        r.finish();
    }
    {
        Reader r = reader(doc, "controller");
        read_controller(r, c.controller);
        r.finish();
    }
    for (auto& [name, section] : doc) {
        if (!name.starts_with("vehicle.")) continue;
        const Entry index{name.substr(8), section.line};
        const long long i = to_integer(index, "[" + name + "]");
        if (i < 1) throw ConfigError("vehicle index must be >= 1", section.line);
        ControllerSpec spec = c.controller;
        Reader r(&section, name);
        read_controller(r, spec);
        r.finish();
        c.overrides[static_cast<std::size_t>(i)] = spec;
    }
    {
        Reader r = reader(doc, "equilibrium");
        r.number("v_e_mps", c.equilibrium.v_e);
        r.number("v_free_mps", c.equilibrium.v_free);
        r.finish();
    }
    {
        Reader r = reader(doc, "platoon");
        r.integer("followers", c.followers, 1);
        r.boolean("bounds_enabled", c.bounds_enabled);
        r.finish();
    }
    {
        Reader r = reader(doc, "input");
        std::vector<double> amps;
        std::vector<double> omegas;
        std::vector<double> hz;
        std::vector<double> phases;
        const bool has_amp = r.numbers("speed_amplitude_mps", amps);
        const bool has_omega = r.numbers("omega_rad_s", omegas);
        const bool has_hz = r.numbers("frequency_hz", hz);
        r.numbers("phase_rad", phases);
        const int line = r.present() ? doc["input"].line : 0;
        if (has_omega && has_hz) throw ConfigError("give either omega_rad_s or frequency_hz, not both", line);
        if (has_hz) {
            omegas.clear();
            for (const double f : hz) omegas.push_back(2.0 * std::numbers::pi * f);
        }
        if (has_amp || has_omega || has_hz) {
            if (amps.size() != omegas.size()) {
                throw ConfigError("speed_amplitude_mps and frequency lists differ in length", line);
            }
            if (!phases.empty() && phases.size() != amps.size()) {
                throw ConfigError("phase_rad list length differs from the amplitude list", line);
            }
            c.input.clear();
            for (std::size_t m = 0; m < amps.size(); ++m) {
                c.input.push_back(InputSpec{amps[m], omegas[m], phases.empty() ? 0.0 : phases[m]});
            }
        }
        r.finish();
    }
    {
        Reader r = reader(doc, "frequency");
        r.number("omega_min_rad_s", c.frequency.omega_min);
        r.number("omega_max_rad_s", c.frequency.omega_max);
        r.integer("points", c.frequency.points, 2);
        r.integer("vehicle", c.frequency.vehicle, 1);
        r.finish();
    }
    {
        Reader r = reader(doc, "wave");
        if (Entry* e = r.find("pairs")) {
            c.wave.pairs.clear();
            for (const auto& item : split_list(e->value)) {
                const long long v = to_integer(Entry{item, e->line}, "pairs");
                if (v < 1) throw ConfigError("pairs must be >= 1", e->line);
                c.wave.pairs.push_back(static_cast<std::size_t>(v));
            }
        }
        r.number("t_start_s", c.wave.t_start);
        r.number("t_end_s", c.wave.t_end);
        r.number("t_step_s", c.wave.t_step);
        r.finish();
    }
    {
        Reader r = reader(doc, "sim");
        r.number("dt_s", c.sim.dt);
        r.integer("warmup_periods", c.sim.warmup_periods, 0);
        r.integer("measure_periods", c.sim.measure_periods, 0);
        r.integer("record_stride", c.sim.record_stride, 1);
        r.number("p0_origin_m", c.sim.p0_origin);
        r.finish();
    }
    {
        Reader r = reader(doc, "sweep");
        r.text("param1", c.sweep.first.param);
        r.numbers("values1", c.sweep.first.values);
        SweepAxis second;
        r.text("param2", second.param);
        const bool has_values2 = r.numbers("values2", second.values);
        if (!second.param.empty() || has_values2) c.sweep.second = second;
        r.finish();
    }
    {
        Reader r = reader(doc, "dfa");
        r.numbers("ratios", c.dfa_ratios);
        r.finish();
    }

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
        return parse_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string render_config(const ExperimentConfig& c) {
    std::string out;
    out += fmt::format("[run]\nname = {}\nmode = {}\noutputs = {}\n\n", c.name, c.mode,
                       join(c.outputs, [](const std::string& s) { return s; }));
    out += "[controller]\n";
    write_controller(out, c.controller);
    for (const auto& [i, spec] : c.overrides) {
        out += fmt::format("\n[vehicle.{}]\n", i);
        write_controller(out, spec);
    }
    out += fmt::format("\n[equilibrium]\nv_e_mps = {}\nv_free_mps = {}\n", num(c.equilibrium.v_e),
                       num(c.equilibrium.v_free));
    out += fmt::format("\n[platoon]\nfollowers = {}\nbounds_enabled = {}\n", c.followers,
                       c.bounds_enabled ? "true" : "false");
    out += fmt::format("\n[input]\nspeed_amplitude_mps = {}\nomega_rad_s = {}\nphase_rad = {}\n",
                       join(c.input, [](const InputSpec& s) { return num(s.speed_amplitude); }),
                       join(c.input, [](const InputSpec& s) { return num(s.omega); }),
                       join(c.input, [](const InputSpec& s) { return num(s.phase); }));
    out += fmt::format("\n[frequency]\nomega_min_rad_s = {}\nomega_max_rad_s = {}\npoints = {}\nvehicle = {}\n",
                       num(c.frequency.omega_min), num(c.frequency.omega_max), c.frequency.points,
                       c.frequency.vehicle);
    out += "\n[wave]\n";
    if (!c.wave.pairs.empty()) {
        out += "pairs = " + join(c.wave.pairs, [](std::size_t i) { return std::to_string(i); }) + "\n";
    }
    out += fmt::format("t_start_s = {}\nt_end_s = {}\nt_step_s = {}\n", num(c.wave.t_start), num(c.wave.t_end),
                       num(c.wave.t_step));
    out += fmt::format(
        "\n[sim]\ndt_s = {}\nwarmup_periods = {}\nmeasure_periods = {}\nrecord_stride = {}\np0_origin_m = {}\n",
        num(c.sim.dt), c.sim.warmup_periods, c.sim.measure_periods, c.sim.record_stride, num(c.sim.p0_origin));
    if (!c.sweep.first.param.empty() || !c.sweep.first.values.empty() || c.sweep.second) {
        out += fmt::format("\n[sweep]\nparam1 = {}\nvalues1 = {}\n", c.sweep.first.param,
                           join(c.sweep.first.values, num));
        if (c.sweep.second) {
            out += fmt::format("param2 = {}\nvalues2 = {}\n", c.sweep.second->param,
                               join(c.sweep.second->values, num));
        }
    }
    if (!c.dfa_ratios.empty()) out += "\n[dfa]\nratios = " + join(c.dfa_ratios, num) + "\n";
    return out;
}

}  // namespace avwave::cli
