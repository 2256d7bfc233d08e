#pragma once

// Desired joint trajectories: (phi_d, phi_d', phi_d'') at time t.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sea/errors.hpp"
#include "sea/spline.hpp"

namespace sea {

struct TrajectorySample {
    double t{};
    double phi_d{};
    double phi_d_dot{};
    double phi_d_ddot{};

    friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

struct Harmonic {
    double amplitude{};  ///< rad
    double phase{};      ///< rad
};

/// phi_d(t) = sum_i A_i sin(2 pi i t / period + psi_i), i = 1..N.
struct WalkingCycle {
    double period{1.6};
    std::vector<Harmonic> harmonics;

    double peak_bound() const {
        double s = 0.0;
        for (const auto& h : harmonics) s += std::abs(h.amplitude);
        return s;
    }
};

/// Step of `size` at `time`. With `smoothing` > 0 the step is a quintic
/// (minimum-jerk) ramp of that duration, so phi_d'' exists.
struct StepReference {
    double size{0.3};
    double time{0.0};
    double smoothing{0.05};
};

struct SineReference {
    double amplitude{0.1};
    double frequency{1.0};  ///< Hz
    double phase{0.0};
    double offset{0.0};
};

struct ConstantReference {
    double value{0.0};
};

/// Spline through tabulated (t, phi_d); clamp-and-hold outside the data.
struct FileReference {
    std::string path;
    std::shared_ptr<const NaturalCubicSpline> spline;
};

using ReferenceSource = std::variant<WalkingCycle, StepReference, SineReference, ConstantReference, FileReference>;

/// Default gait: two harmonics, 1.6 s period, +-0.4 rad swing. The second
/// harmonic is -1/2 of the first so the gait starts from rest: phi_d, phi_d'
/// and phi_d'' are all zero at t = 0.
inline WalkingCycle default_walking_cycle() {
    constexpr double peak = 0.4;
    // max of sin(x) - sin(2x)/2 is 3 sqrt(3) / 4, reached at x = 2 pi / 3
    const double a1 = peak / (3.0 * std::sqrt(3.0) / 4.0);
    return {1.6, {{a1, 0.0}, {a1 / 2.0, std::numbers::pi}}};
}

inline WalkingCycle synthetic_walking_cycle(double period, std::vector<Harmonic> harmonics,
                                            double max_amplitude = 1.2) {
    if (!(period > 0.0)) throw DomainError("reference.period", "must be > 0");
    WalkingCycle w{period, std::move(harmonics)};
    if (w.peak_bound() > max_amplitude)
        throw ConfigError("reference.harmonics", "",
                          "summed amplitude " + std::to_string(w.peak_bound()) + " rad exceeds the operating range (" +
                              std::to_string(max_amplitude) + " rad)");
    return w;
}

namespace detail {

inline TrajectorySample sample_of(const WalkingCycle& w, double t) {
    TrajectorySample s{t, 0.0, 0.0, 0.0};
    const double base = 2.0 * std::numbers::pi / w.period;
    for (std::size_t i = 0; i < w.harmonics.size(); ++i) {
        const double rate = base * static_cast<double>(i + 1);
        const double arg = rate * t + w.harmonics[i].phase;
        const double a = w.harmonics[i].amplitude;
        s.phi_d += a * std::sin(arg);
        s.phi_d_dot += a * rate * std::cos(arg);
        s.phi_d_ddot -= a * rate * rate * std::sin(arg);
    }
    return s;
}

inline TrajectorySample sample_of(const StepReference& r, double t) {
    if (t < r.time) return {t, 0.0, 0.0, 0.0};
    if (r.smoothing <= 0.0 || t >= r.time + r.smoothing) return {t, r.size, 0.0, 0.0};
    const double w = r.smoothing;
    const double x = (t - r.time) / w;
    const double x2 = x * x, x3 = x2 * x;
    const double s = x3 * (10.0 - 15.0 * x + 6.0 * x2);
    const double ds = 30.0 * x2 * (1.0 - x) * (1.0 - x);
    const double d2s = 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
    return {t, r.size * s, r.size * ds / w, r.size * d2s / (w * w)};
}

inline TrajectorySample sample_of(const SineReference& r, double t) {
    const double rate = 2.0 * std::numbers::pi * r.frequency;
    const double arg = rate * t + r.phase;
    return {t, r.offset + r.amplitude * std::sin(arg), r.amplitude * rate * std::cos(arg),
            -r.amplitude * rate * rate * std::sin(arg)};
}

inline TrajectorySample sample_of(const ConstantReference& r, double t) { return {t, r.value, 0.0, 0.0}; }

inline TrajectorySample sample_of(const FileReference& r, double t) {
    const auto& sp = *r.spline;
    if (t <= sp.t_min()) return {t, sp(sp.t_min()).y, 0.0, 0.0};
    if (t >= sp.t_max()) return {t, sp(sp.t_max()).y, 0.0, 0.0};
    const auto v = sp(t);
    return {t, v.y, v.dy, v.d2y};
}

}  // namespace detail

/// Analytic sources are defined for t >= 0; file sources clamp and hold.
inline TrajectorySample sample(const ReferenceSource& src, double t) {
    if (!std::isfinite(t) || (t < 0.0 && !std::holds_alternative<FileReference>(src)))
        throw DomainError("t", "reference sampled outside its domain (t = " + std::to_string(t) + ")");
    return std::visit([t](const auto& s) { return detail::sample_of(s, t); }, src);
}

/// Largest |phi_d| the source can produce (an upper bound for the gait).
inline double reference_peak(const ReferenceSource& src) {
    struct Visitor {
        double operator()(const WalkingCycle& w) const { return w.peak_bound(); }
        double operator()(const StepReference& s) const { return std::abs(s.size); }
        double operator()(const SineReference& s) const { return std::abs(s.offset) + std::abs(s.amplitude); }
        double operator()(const ConstantReference& c) const { return std::abs(c.value); }
        double operator()(const FileReference& f) const {
            double m = 0.0;
            for (double y : f.spline->coeff_a()) m = std::max(m, std::abs(y));
            return m;
        }
    };
    return std::visit(Visitor{}, src);
}

/// Parses the trajectory text format: header `t,phi_d`, one sample per line,
/// `#` comment lines and blank lines ignored.
inline FileReference parse_trajectory(std::istream& in, std::string origin = {}) {
    std::vector<double> ts, ys;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;

    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
        return s;
    };
    auto to_double = [&](std::string_view s, const char* what) {
        s = trim(s);
        double v{};
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
            throw IngestionError(row, std::string("malformed ") + what + " value '" + std::string(s) + "'");
        return v;
    };

    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        if (!header_seen) {
            if (sv != "t,phi_d") throw IngestionError(row, "expected header 't,phi_d', got '" + std::string(sv) + "'");
            header_seen = true;
            continue;
        }
        const auto comma = sv.find(',');
        if (comma == std::string_view::npos || sv.find(',', comma + 1) != std::string_view::npos)
            throw IngestionError(row, "expected two comma-separated fields");
        const double t = to_double(sv.substr(0, comma), "t");
        const double y = to_double(sv.substr(comma + 1), "phi_d");
        if (!ts.empty() && !(t > ts.back()))
            throw IngestionError(row, "t must be strictly increasing (" + std::to_string(t) +
                                          " after " + std::to_string(ts.back()) + ")");
        ts.push_back(t);
        ys.push_back(y);
    }
    if (!header_seen) throw IngestionError(0, "missing header 't,phi_d'");
    if (ts.size() < 4) throw IngestionError(0, "need at least 4 samples, got " + std::to_string(ts.size()));
    return {std::move(origin), std::make_shared<const NaturalCubicSpline>(ts, ys)};
}

inline FileReference load_trajectory_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError(0, "cannot open trajectory file '" + path + "'");
    return parse_trajectory(in, path);
}

/// Writes phi_d of `src` sampled every `dt` over [0, duration] in the
/// trajectory file format.
inline void write_trajectory(std::ostream& out, const ReferenceSource& src, double dt, double duration) {
    out << "t,phi_d\n";
    const auto n = static_cast<long>(std::llround(duration / dt));
    char buf[64];
    for (long i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const auto s = sample(src, t);
        auto r1 = std::to_chars(buf, buf + sizeof buf, t, std::chars_format::general, 17);
        *r1.ptr++ = ',';
        auto r2 = std::to_chars(r1.ptr, buf + sizeof buf, s.phi_d, std::chars_format::general, 17);
        out.write(buf, r2.ptr - buf);
        out << '\n';
    }
}

}  // namespace sea
