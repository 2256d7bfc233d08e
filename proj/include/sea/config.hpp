#pragma once

// Experiment configuration: a flat table of dotted keys.
//
//   # comment
//   [gains]
//   c = 20          -> gains.c
//   plant.k = 20000 -> keys may also be written out in full
//
// Precedence is defaults <- file <- --set overrides. Every value is kept as
// text together with where it came from, so diagnostics can name the key and
// its location and the resolved table can be echoed and re-read exactly.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sea/errors.hpp"
#include "sea/motor.hpp"
#include "sea/simulator.hpp"

namespace sea {

enum class ValueKind { number, integer, boolean, text };

struct KeyInfo {
    std::string name;
    ValueKind kind;
    std::string description;
};

struct ConfigEntry {
    std::string value;
    std::string location;  ///< "default", "file:line", "--set", "manifest"
};

using ConfigValues = std::map<std::string, ConfigEntry>;

/// Number formatting shared by the config echo and all CSV output.
inline std::string format_number(double v) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {buf, r.ptr};
}

namespace detail {

inline std::string harmonics_to_string(const std::vector<Harmonic>& hs) {
    std::string s;
    for (const auto& h : hs) {
        if (!s.empty()) s += ';';
        s += format_number(h.amplitude) + ':' + format_number(h.phase);
    }
    return s;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/// All recognised keys with their defaults, in documentation order.
inline const std::vector<std::pair<KeyInfo, std::string>>& config_schema() {
    static const std::vector<std::pair<KeyInfo, std::string>> schema = [] {
        using K = ValueKind;
        const SimConfig d;
        const MotorParams mp;
        const WalkingCycle walk = default_walking_cycle();
        const StepReference step;
        const SineReference sine;
        auto n = format_number;
        return std::vector<std::pair<KeyInfo, std::string>>{
            {{"sim.dt_plant", K::number, "integration step, s"}, n(d.dt_plant)},
            {{"sim.duration", K::number, "run length, s"}, n(d.duration)},
            {{"sim.decimation", K::integer, "log every n-th plant step"}, std::to_string(d.decimation)},
            {{"sim.divergence_threshold", K::number, "abort when any |state| exceeds this"}, n(d.divergence_threshold)},
            {{"sim.controller_enabled", K::boolean, "false holds U_eq at 0"}, "true"},
            {{"sim.freeze_spring", K::boolean, "true keeps delta at its initial value"}, "false"},

            {{"initial.phi", K::number, "rad"}, n(d.initial.phi)},
            {{"initial.phi_dot", K::number, "rad/s"}, n(d.initial.phi_dot)},
            {{"initial.delta", K::number, "m"}, n(d.initial.delta)},
            {{"initial.delta_dot", K::number, "m/s"}, n(d.initial.delta_dot)},

            {{"plant.m", K::number, "limb mass, kg"}, n(d.plant.m)},
            {{"plant.B", K::number, "joint damping, N m s/rad"}, n(d.plant.B)},
            {{"plant.k", K::number, "spring stiffness, N/m"}, n(d.plant.k)},
            {{"plant.g", K::number, "gravity, m/s^2"}, n(d.plant.g)},

            {{"geometry.d1", K::number, "m"}, n(d.geometry.d1)},
            {{"geometry.d2", K::number, "m"}, n(d.geometry.d2)},
            {{"geometry.d3", K::number, "m"}, n(d.geometry.d3)},
            {{"geometry.d4", K::number, "m"}, n(d.geometry.d4)},
            {{"geometry.d5", K::number, "m"}, n(d.geometry.d5)},
            {{"geometry.theta_min", K::number, "rad"}, n(d.range.theta_min)},
            {{"geometry.theta_max", K::number, "rad"}, n(d.range.theta_max)},

            {{"gains.c", K::number, "sliding surface slope"}, n(d.gains.c)},
            {{"gains.rho", K::number, "switching gain"}, n(d.gains.rho)},
            {{"gains.k1", K::number, "first backstepping gain"}, n(d.gains.k1)},
            {{"gains.k2", K::number, "second backstepping gain"}, n(d.gains.k2)},

            {{"controller.update_period", K::number, "s"}, n(d.controller.update_period)},
            {{"controller.deriv_filter_tau", K::number, "s"}, n(d.controller.deriv_filter_tau)},
            {{"controller.boundary_layer", K::number, "0 = sign()"}, n(d.controller.boundary_layer)},
            {{"controller.nominal_tau_d", K::number, "N m"}, n(d.controller.nominal_tau_d)},
            {{"controller.coupling_weight", K::number, "w"}, n(d.controller.coupling_weight)},
            {{"controller.voltage_limit", K::number, "0 = unlimited"}, n(d.controller.voltage_limit)},

            {{"disturbance.kind", K::text, "none | constant | sinusoid | pulse"}, "none"},
            {{"disturbance.amplitude", K::number, "N m"}, "0"},
            {{"disturbance.frequency", K::number, "Hz"}, "0"},
            {{"disturbance.start", K::number, "s"}, "0"},
            {{"disturbance.duration", K::number, "s"}, "0"},

            {{"reference.kind", K::text, "walk | step | sine | constant | file"}, "walk"},
            {{"reference.period", K::number, "walk period, s"}, n(walk.period)},
            {{"reference.harmonics", K::text, "amplitude:phase;..."}, detail::harmonics_to_string(walk.harmonics)},
            {{"reference.step_size", K::number, "rad"}, n(step.size)},
            {{"reference.step_time", K::number, "s"}, n(step.time)},
            {{"reference.smoothing", K::number, "step ramp length, s"}, n(step.smoothing)},
            {{"reference.amplitude", K::number, "sine, rad"}, n(sine.amplitude)},
            {{"reference.frequency", K::number, "sine, Hz"}, n(sine.frequency)},
            {{"reference.phase", K::number, "sine, rad"}, n(sine.phase)},
            {{"reference.offset", K::number, "sine, rad"}, n(sine.offset)},
            {{"reference.value", K::number, "constant, rad"}, "0"},
            {{"reference.file", K::text, "t,phi_d table"}, ""},

            {{"metrics.error_band", K::number, "rad"}, n(d.metrics.error_band)},
            {{"metrics.hold_time", K::number, "s"}, n(d.metrics.hold_time)},
            {{"metrics.final_fraction", K::number, ""}, n(d.metrics.final_fraction)},
            {{"metrics.transient_exclusion", K::number, "s"}, n(d.metrics.transient_exclusion)},

            {{"sweep.axis", K::text, "c | rho | k1 | k2"}, "c"},
            {{"sweep.values", K::text, "comma separated"}, "10,20"},

            {{"motor.R", K::number, "ohm"}, n(mp.R)},
            {{"motor.L", K::number, "H"}, n(mp.L_ind)},
            {{"motor.K_T", K::number, "N m/A"}, n(mp.K_T)},
            {{"motor.K_EMF", K::number, "V s/rad"}, n(mp.K_EMF)},
            {{"motor.J_M", K::number, "kg m^2"}, n(mp.J_M)},
            {{"motor.B_M", K::number, "N m s/rad"}, n(mp.B_M)},
            {{"motor.J_eq", K::text, "kg m^2, empty = derive from the transmission"}, n(*mp.J_eq)},
            {{"motor.J_s", K::text, "kg m^2, optional"}, ""},
            {{"motor.m0", K::text, "kg, optional"}, ""},
            {{"motor.n", K::text, "gear ratio, optional"}, ""},
            {{"motor.lead", K::text, "m, optional"}, ""},
            {{"motor.eta1", K::text, "optional"}, ""},
            {{"motor.eta2", K::text, "optional"}, ""},
            // highest harmonic of the default gait, 2 * 2 pi / 1.6 s
            {{"motor.rate", K::number, "rate for the neglected-term report, rad/s"},
             n(2.0 * 2.0 * std::numbers::pi / walk.period)},
        };
    }();
    return schema;
}

inline const KeyInfo* find_key(std::string_view name) {
    for (const auto& [info, def] : config_schema())
        if (info.name == name) return &info;
    return nullptr;
}

inline ConfigValues default_values() {
    ConfigValues v;
    for (const auto& [info, def] : config_schema()) v[info.name] = {def, "default"};
    return v;
}

/// Sets one key, rejecting unknown names.
inline void set_value(ConfigValues& values, const std::string& key, std::string value, const std::string& location) {
    if (!find_key(key)) throw ConfigError(key, location, "unknown key");
    values[key] = {std::move(value), location};
}

/// Applies `key = value` lines with optional [section] headers.
inline void apply_config_text(ConfigValues& values, std::istream& in, const std::string& origin) {
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string_view sv = detail::trim(line);
        if (sv.empty() || sv.front() == '#' || sv.front() == ';') continue;
        if (sv.front() == '[') {
            if (sv.back() != ']') throw ConfigError("", where, "malformed section header");
            section = std::string(detail::trim(sv.substr(1, sv.size() - 2)));
            continue;
        }
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos) throw ConfigError("", where, "expected `key = value`");
        std::string key(detail::trim(sv.substr(0, eq)));
        std::string_view value = detail::trim(sv.substr(eq + 1));
        if (key.empty()) throw ConfigError("", where, "empty key");
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        set_value(values, key, std::string(value), where);
    }
}

inline void apply_config_file(ConfigValues& values, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", path, "cannot open configuration file");
    apply_config_text(values, in, path);
}

/// `key=value` from the command line.
inline void apply_override(ConfigValues& values, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError(std::string(assignment), "--set", "expected key=value");
    set_value(values, std::string(detail::trim(assignment.substr(0, eq))),
              std::string(detail::trim(assignment.substr(eq + 1))), "--set");
}

// ---------------------------------------------------------------------------
// typed access

class ConfigReader {
public:
    explicit ConfigReader(const ConfigValues& v) : values_(v) {}

    const ConfigEntry& entry(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError(key, "", "missing key");
        return it->second;
    }

    double number(const std::string& key) const {
        const auto& e = entry(key);
        return parse_number(key, e.value, e.location);
    }

    std::optional<double> optional_number(const std::string& key) const {
        const auto& e = entry(key);
        if (e.value.empty()) return std::nullopt;
        return parse_number(key, e.value, e.location);
    }

    int integer(const std::string& key) const {
        const auto& e = entry(key);
        int v{};
        auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
        if (ec != std::errc{} || ptr != e.value.data() + e.value.size())
            throw ConfigError(key, e.location, "expected an integer, got '" + e.value + "'");
        return v;
    }

    bool boolean(const std::string& key) const {
        const auto& e = entry(key);
        if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
        if (e.value == "false" || e.value == "0" || e.value == "no") return false;
        throw ConfigError(key, e.location, "expected true or false, got '" + e.value + "'");
    }

    const std::string& text(const std::string& key) const { return entry(key).value; }

    std::vector<double> number_list(const std::string& key, char sep) const {
        const auto& e = entry(key);
        std::vector<double> out;
        std::string_view rest = e.value;
        while (!rest.empty()) {
            const auto pos = rest.find(sep);
            out.push_back(parse_number(key, std::string(detail::trim(rest.substr(0, pos))), e.location));
            if (pos == std::string_view::npos) break;
            rest = rest.substr(pos + 1);
        }
        return out;
    }

    /// Location of a key, for mapping validation failures back to their origin.
    std::string location(const std::string& key) const {
        auto it = values_.find(key);
        return it == values_.end() ? std::string{} : it->second.location;
    }

private:
    static double parse_number(const std::string& key, const std::string& s, const std::string& where) {
        double v{};
        const char* first = s.data();
        if (!s.empty() && s.front() == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
            throw ConfigError(key, where, "expected a number, got '" + s + "'");
        return v;
    }

    const ConfigValues& values_;
};

namespace detail {

inline std::vector<Harmonic> parse_harmonics(const ConfigReader& r) {
    const auto& e = r.entry("reference.harmonics");
    std::vector<Harmonic> hs;
    std::string_view rest = e.value;
    while (!rest.empty()) {
        const auto pos = rest.find(';');
        std::string_view item = trim(rest.substr(0, pos));
        const auto colon = item.find(':');
        auto num = [&](std::string_view s) {
            s = trim(s);
            double v{};
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
                throw ConfigError("reference.harmonics", e.location, "malformed harmonic '" + std::string(item) + "'");
            return v;
        };
        if (!item.empty()) {
            if (colon == std::string_view::npos) hs.push_back({num(item), 0.0});
            else hs.push_back({num(item.substr(0, colon)), num(item.substr(colon + 1))});
        }
        if (pos == std::string_view::npos) break;
        rest = rest.substr(pos + 1);
    }
    if (hs.empty()) throw ConfigError("reference.harmonics", e.location, "at least one harmonic is required");
    return hs;
}

/// Field names raised by the model code that are not already dotted keys.
inline std::string qualify_field(const std::string& field) {
    if (field.find('.') != std::string::npos) return field;
    if (field.size() == 2 && field[0] == 'd') return "geometry." + field;
    if (field == "t" || field == "theta") return "geometry.theta_max";
    if (field == "reference") return "reference.kind";
    return field;
}

}  // namespace detail

inline ReferenceSource build_reference(const ConfigReader& r) {
    const std::string& kind = r.text("reference.kind");
    if (kind == "walk") {
        auto hs = detail::parse_harmonics(r);
        const double period = r.number("reference.period");
        if (!(period > 0.0)) throw ConfigError("reference.period", r.location("reference.period"), "must be > 0");
        try {
            return synthetic_walking_cycle(period, std::move(hs));
        } catch (const ConfigError& e) {
            throw ConfigError("reference.harmonics", r.location("reference.harmonics"), e.what());
        }
    }
    if (kind == "step")
        return StepReference{r.number("reference.step_size"), r.number("reference.step_time"),
                             r.number("reference.smoothing")};
    if (kind == "sine")
        return SineReference{r.number("reference.amplitude"), r.number("reference.frequency"),
                             r.number("reference.phase"), r.number("reference.offset")};
    if (kind == "constant") return ConstantReference{r.number("reference.value")};
    if (kind == "file") {
        const std::string& path = r.text("reference.file");
        if (path.empty()) throw ConfigError("reference.file", r.location("reference.file"), "path required");
        try {
            return load_trajectory_file(path);
        } catch (const IngestionError& e) {
            throw ConfigError("reference.file", r.location("reference.file"), e.what());
        }
    }
    throw ConfigError("reference.kind", r.location("reference.kind"), "unknown reference kind '" + kind + "'");
}

inline DisturbanceProfile build_disturbance(const ConfigReader& r) {
    const std::string& kind = r.text("disturbance.kind");
    DisturbanceProfile d;
    if (kind == "none") d.kind = DisturbanceProfile::Kind::none;
    else if (kind == "constant") d.kind = DisturbanceProfile::Kind::constant;
    else if (kind == "sinusoid") d.kind = DisturbanceProfile::Kind::sinusoid;
    else if (kind == "pulse") d.kind = DisturbanceProfile::Kind::pulse;
    else throw ConfigError("disturbance.kind", r.location("disturbance.kind"), "unknown disturbance kind '" + kind + "'");
    d.amplitude = r.number("disturbance.amplitude");
    d.frequency = r.number("disturbance.frequency");
    d.start = r.number("disturbance.start");
    d.duration = r.number("disturbance.duration");
    return d;
}

/// Builds and validates a SimConfig. Any invariant violation is reported as a
/// ConfigError naming the offending key and where it was set.
inline SimConfig build_sim_config(const ConfigValues& values) {
    const ConfigReader r(values);
    try {
        SimConfig c;
        c.dt_plant = r.number("sim.dt_plant");
        c.duration = r.number("sim.duration");
        c.decimation = r.integer("sim.decimation");
        c.divergence_threshold = r.number("sim.divergence_threshold");
        c.controller_enabled = r.boolean("sim.controller_enabled");
        c.freeze_spring = r.boolean("sim.freeze_spring");

        c.initial = {r.number("initial.phi"), r.number("initial.phi_dot"), r.number("initial.delta"),
                     r.number("initial.delta_dot")};
        c.plant = {r.number("plant.m"), r.number("plant.B"), r.number("plant.k"), r.number("plant.g")};
        c.geometry = derive_geometry(r.number("geometry.d1"), r.number("geometry.d2"), r.number("geometry.d3"),
                                     r.number("geometry.d4"), r.number("geometry.d5"));
        c.range = {r.number("geometry.theta_min"), r.number("geometry.theta_max")};
        c.gains = {r.number("gains.c"), r.number("gains.rho"), r.number("gains.k1"), r.number("gains.k2")};

        c.controller.update_period = r.number("controller.update_period");
        c.controller.deriv_filter_tau = r.number("controller.deriv_filter_tau");
        c.controller.boundary_layer = r.number("controller.boundary_layer");
        c.controller.nominal_tau_d = r.number("controller.nominal_tau_d");
        c.controller.coupling_weight = r.number("controller.coupling_weight");
        c.controller.voltage_limit = r.number("controller.voltage_limit");

        c.disturbance = build_disturbance(r);
        c.reference = build_reference(r);

        c.metrics.error_band = r.number("metrics.error_band");
        c.metrics.hold_time = r.number("metrics.hold_time");
        c.metrics.final_fraction = r.number("metrics.final_fraction");
        c.metrics.transient_exclusion = r.number("metrics.transient_exclusion");

        c.validate();
        return c;
    } catch (const DomainError& e) {
        const std::string key = detail::qualify_field(e.field());
        throw ConfigError(key, r.location(key), e.what());
    } catch (const SingularConfigurationError& e) {
        throw ConfigError("geometry", "", e.what());
    }
}

inline MotorParams build_motor_params(const ConfigValues& values) {
    const ConfigReader r(values);
    MotorParams mp;
    mp.R = r.number("motor.R");
    mp.L_ind = r.number("motor.L");
    mp.K_T = r.number("motor.K_T");
    mp.K_EMF = r.number("motor.K_EMF");
    mp.J_M = r.number("motor.J_M");
    mp.B_M = r.number("motor.B_M");
    mp.J_eq = r.optional_number("motor.J_eq");
    mp.J_s = r.optional_number("motor.J_s");
    mp.m0 = r.optional_number("motor.m0");
    mp.n = r.optional_number("motor.n");
    mp.lead = r.optional_number("motor.lead");
    mp.eta1 = r.optional_number("motor.eta1");
    mp.eta2 = r.optional_number("motor.eta2");
    return mp;
}

inline ReducedMotorModel build_reduced_motor(const ConfigValues& values) {
    const ConfigReader r(values);
    try {
        return reduce_motor_model(build_motor_params(values));
    } catch (const DomainError& e) {
        throw ConfigError(e.field(), r.location(e.field()), e.what());
    }
}

struct SweepSpec {
    GainAxis axis{GainAxis::c};
    std::vector<double> values;
};

inline SweepSpec build_sweep_spec(const ConfigValues& values) {
    const ConfigReader r(values);
    SweepSpec s;
    const auto axis = parse_gain_axis(r.text("sweep.axis"));
    if (!axis) throw ConfigError("sweep.axis", r.location("sweep.axis"), "expected c, rho, k1 or k2");
    s.axis = *axis;
    s.values = r.number_list("sweep.values", ',');
    if (s.values.empty()) throw ConfigError("sweep.values", r.location("sweep.values"), "no values given");
    for (double v : s.values)
        if (!(v > 0.0)) throw ConfigError("sweep.values", r.location("sweep.values"), "gain values must be > 0");
    return s;
}

/// defaults <- file (if any) <- overrides.
inline ConfigValues resolve_config(const std::string& path, const std::vector<std::string>& overrides) {
    ConfigValues v = default_values();
    if (!path.empty()) apply_config_file(v, path);
    for (const auto& o : overrides) apply_override(v, o);
    return v;
}

inline SimConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
    return build_sim_config(resolve_config(path, overrides));
}

/// The resolved table as a config file; reading it back reproduces `values`.
inline void write_config(std::ostream& out, const ConfigValues& values) {
    std::string section;
    for (const auto& [info, def] : config_schema()) {
        const auto dot = info.name.find('.');
        const std::string sec = info.name.substr(0, dot);
        if (sec != section) {
            out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
            section = sec;
        }
        out << info.name.substr(dot + 1) << " = " << values.at(info.name).value << '\n';
    }
}

}  // namespace sea
