#pragma once

// Self-check suite run by `sea_sim validate`: every module invariant as a
// pass/fail line. The options carry the configuration under test so faults
// (a corrupted d6, a coarse dt) can be injected and seen to fail.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sea/controller.hpp"
#include "sea/geometry.hpp"
#include "sea/integrator.hpp"
#include "sea/motor.hpp"
#include "sea/plant.hpp"
#include "sea/reference.hpp"
#include "sea/simulator.hpp"

namespace sea {

struct CheckResult {
    std::string name;
    bool passed{};
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }

    void print(std::ostream& out) const {
        for (const auto& c : checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
    }
};

struct ValidationOptions {
    SimConfig base{};
    int geometry_samples{10000};
    std::uint64_t seed{0x5ea5eedULL};
};

namespace detail {

struct Point {
    double x, y;
};

inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

/// Mounting points in the hip frame built from the measured lengths only:
/// E at the origin, B fixed on the frame, C carried by the limb at angle phi.
struct LinkagePoints {
    Point B, C;
};

inline LinkagePoints linkage_points(const LinkGeometry& g, double theta) {
    const double phi = theta + std::atan(g.d1 / (g.d2 + g.d3));
    const Point axis{std::sin(phi), -std::cos(phi)};
    const Point normal{std::cos(phi), std::sin(phi)};
    const double along = g.d2 + g.d3;
    return {{-g.d5, g.d4}, {along * axis.x - g.d1 * normal.x, along * axis.y - g.d1 * normal.y}};
}

inline std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

}  // namespace detail

/// Largest relative deviation of (length, arm, torque) from the coordinate
/// oracle over random angles in the operating range.
struct GeometryDeviation {
    double length{}, arm{}, torque{};
};

inline GeometryDeviation geometry_oracle_deviation(const LinkGeometry& g, const OperatingRange& range, int samples,
                                                   std::uint64_t seed, double k = 20000.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> theta_dist(range.theta_min, range.theta_max);
    std::uniform_real_distribution<double> delta_dist(-0.01, 0.01);
    GeometryDeviation dev;
    for (int i = 0; i < samples; ++i) {
        const double theta = theta_dist(rng);
        const double delta = delta_dist(rng);
        const auto [B, C] = detail::linkage_points(g, theta);
        const detail::Point BC{C.x - B.x, C.y - B.y};
        const double len = std::hypot(BC.x, BC.y);
        const double arm = detail::cross(B, C) / len;
        // spring force on C acts along the SEA axis, -k delta towards B
        const double fx = -k * delta * BC.x / len;
        const double fy = -k * delta * BC.y / len;
        const double torque = detail::cross(C, {fx, fy});

        const double scale = g.d6;  // arms pass through zero; compare against the link size
        dev.length = std::max(dev.length, std::abs(sea_length(g, theta) - len) / len);
        dev.arm = std::max(dev.arm, std::abs(moment_arm(g, theta) - arm) / scale);
        dev.torque = std::max(dev.torque, std::abs(sea_torque(g, k, phi_from_theta(g, theta), delta) - torque) /
                                              (k * std::abs(delta) * scale + 1e-300));
    }
    return dev;
}

/// Observed order p from three step sizes h, h/2, h/4 on the damped pendulum.
inline double richardson_order(const PlantParams& p, const LinkGeometry& g, double h, double horizon = 1.0) {
    auto endpoint = [&](double dt) {
        PlantState x{0.5, 0.0, 0.0, 0.0};
        const long n = std::lround(horizon / dt);
        for (long i = 0; i < n; ++i) x = rk4_step(p, g, x, i * dt, dt, 0.0, DisturbanceProfile{}, true);
        return x;
    };
    const PlantState a = endpoint(h), b = endpoint(h / 2), c = endpoint(h / 4);
    const double e1 = std::abs(a.phi - b.phi), e2 = std::abs(b.phi - c.phi);
    if (!std::isfinite(e1) || !std::isfinite(e2) || e2 == 0.0) return 0.0;
    return std::log2(e1 / e2);
}

/// L-infinity difference in phi between runs at dt and dt/2 (same controller).
inline double dt_halving_drift(SimConfig cfg) {
    cfg.decimation = std::max(1, cfg.decimation);
    const RunResult coarse = run_simulation(cfg);
    cfg.dt_plant /= 2.0;
    cfg.decimation *= 2;
    const RunResult fine = run_simulation(cfg);
    if (!coarse.ok() || !fine.ok()) throw DivergenceError(0.0, "run failed: " + coarse.message + fine.message);
    double drift = 0.0;
    const std::size_t n = std::min(coarse.trace.size(), fine.trace.size());
    for (std::size_t i = 0; i < n; ++i) drift = std::max(drift, std::abs(coarse.trace[i].phi - fine.trace[i].phi));
    return drift;
}

inline ValidationReport run_validation_suite(const ValidationOptions& opt = {}) {
    ValidationReport report;
    const SimConfig& base = opt.base;
    const LinkGeometry& g = base.geometry;
    const PlantParams& p = base.plant;

    auto check = [&](std::string name, const std::function<CheckResult()>& body) {
        CheckResult r;
        try {
            r = body();
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.name = std::move(name);
        report.checks.push_back(std::move(r));
    };

    GeometryDeviation dev{};
    check("geometry.law_of_cosines", [&] {
        dev = geometry_oracle_deviation(g, base.range, opt.geometry_samples, opt.seed, p.k);
        return CheckResult{{}, dev.length <= 1e-12, "max rel dev " + detail::fmt(dev.length)};
    });
    check("geometry.moment_arm", [&] { return CheckResult{{}, dev.arm <= 1e-12, "max rel dev " + detail::fmt(dev.arm)}; });
    check("geometry.torque_identity",
          [&] { return CheckResult{{}, dev.torque <= 1e-12, "max rel dev " + detail::fmt(dev.torque)}; });
    check("geometry.operating_range", [&] {
        check_operating_range(g, base.range);
        return CheckResult{{}, true, "no singular arm or triangle violation"};
    });

    check("plant.superposition", [&] {
        std::mt19937_64 rng(opt.seed + 1);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            PlantState s{0.8 * u(rng), u(rng), 0.01 * u(rng), u(rng)};
            const double t1 = u(rng), t2 = u(rng);
            const double a = joint_accel(p, g, s, t1 + t2);
            const double b = joint_accel(p, g, s, t1) + joint_accel(p, g, s, t2) - joint_accel(p, g, s, 0.0);
            worst = std::max(worst, std::abs(a - b) / (std::abs(a) + 1.0));
            PlantState s1 = s, s2 = s, s0 = s;
            s1.delta = 0.01 * u(rng);
            s2.delta = 0.01 * u(rng);
            PlantState s12 = s;
            s12.delta = s1.delta + s2.delta;
            s0.delta = 0.0;
            const double c = joint_accel(p, g, s12, t1);
            const double d = joint_accel(p, g, s1, t1) + joint_accel(p, g, s2, t1) - joint_accel(p, g, s0, t1);
            worst = std::max(worst, std::abs(c - d) / (std::abs(c) + 1.0));
        }
        return CheckResult{{}, worst <= 1e-10, "max rel dev " + detail::fmt(worst)};
    });

    check("plant.energy_passive", [&] {
        // controller off, spring frozen at zero deflection: only gravity and damping act
        PlantState x{0.4, 0.0, 0.0, 0.0};
        double prev = joint_energy(p, g, x);
        double rise = 0.0;
        const long n = std::lround(2.0 / base.dt_plant);
        for (long i = 0; i < n; ++i) {
            x = rk4_step(p, g, x, i * base.dt_plant, base.dt_plant, 0.0, DisturbanceProfile{}, true);
            const double e = joint_energy(p, g, x);
            rise = std::max(rise, e - prev);
            prev = e;
        }
        return CheckResult{{}, rise <= 1e-12, "largest energy increase " + detail::fmt(rise) + " J"};
    });

    check("integrator.spring_closed_form", [&] {
        const double dt = base.dt_plant;
        const double omega = std::sqrt(p.omega_sq());
        PlantParams free = p;
        LinkGeometry flat = g;
        PlantState x{0.0, 0.0, 0.001, 0.0};
        const long n = std::lround(1.0 / dt);
        double worst = 0.0;
        // pure spring: joint frozen, gravity reaction removed by zeroing g
        free.g = 0.0;
        for (long i = 0; i < n; ++i) {
            auto field = [&](double, const PlantState& s) {
                return PlantState{0.0, 0.0, s.delta_dot, sea_accel(free, flat, s, 0.0)};
            };
            x = rk4_step(field, i * dt, x, dt);
            worst = std::max(worst, std::abs(x.delta - 0.001 * std::cos(omega * (i + 1) * dt)));
        }
        return CheckResult{{}, worst <= 1e-6, "max |delta - closed form| " + detail::fmt(worst) + " m"};
    });

    check("integrator.richardson_order", [&] {
        const double order = richardson_order(p, g, 20.0 * base.dt_plant);
        return CheckResult{{}, std::abs(order - 4.0) < 0.25, "observed order " + detail::fmt(order)};
    });

    check("simulator.dt_halving", [&] {
        const double drift = dt_halving_drift(base);
        return CheckResult{{}, drift < 1e-4, "L-inf phi drift " + detail::fmt(drift) + " rad"};
    });

    check("simulator.determinism", [&] {
        SimConfig cfg = base;
        cfg.duration = std::min(cfg.duration, 2.0);
        if (const auto* w = std::get_if<WalkingCycle>(&cfg.reference)) cfg.duration = std::max(cfg.duration, w->period);
        const RunResult a = run_simulation(cfg), b = run_simulation(cfg);
        std::ostringstream sa, sb;
        write_trace_csv(sa, a.trace);
        write_trace_csv(sb, b.trace);
        return CheckResult{{}, sa.str() == sb.str(), std::to_string(a.trace.size()) + " rows compared"};
    });

    check("simulator.zoh_breakpoints", [&] {
        SimConfig cfg = base;
        cfg.decimation = 1;
        cfg.duration = 0.05;
        cfg.reference = ConstantReference{0.1};
        const RunResult r = run_simulation(cfg);
        const long per = cfg.steps_per_update();
        long bad = 0;
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            if (r.trace[i].u_eq != r.trace[i - 1].u_eq && static_cast<long>(i) % per != 0) ++bad;
        return CheckResult{{}, r.ok() && bad == 0, std::to_string(bad) + " changes between update instants"};
    });

    check("simulator.equilibrium", [&] {
        SimConfig cfg = base;
        cfg.reference = ConstantReference{0.0};
        cfg.initial = {};
        cfg.disturbance = {};
        cfg.duration = 1.0;
        const RunResult r = run_simulation(cfg);
        double worst = 0.0;
        for (const auto& row : r.trace) worst = std::max({worst, std::abs(row.phi), std::abs(row.u_eq)});
        return CheckResult{{}, r.ok() && worst == 0.0, "max |phi|, |U_eq| " + detail::fmt(worst)};
    });

    check("metrics.perfect_trace", [&] {
        std::vector<TraceRecord> trace(101);
        for (std::size_t i = 0; i < trace.size(); ++i) trace[i].t = 0.01 * static_cast<double>(i);
        const Metrics m = compute_metrics(trace, {});
        const bool ok = m.transient_time == 0.0 && m.steady_state_error == 0.0 &&
                        m.max_abs_error_after_transient == 0.0 && m.sigma_rms_steady == 0.0;
        return CheckResult{{}, ok, "all error metrics zero"};
    });

    check("reference.default_gait", [&] {
        const auto w = default_walking_cycle();
        const auto s0 = sample(w, 0.0);
        double peak = 0.0;
        for (int i = 0; i <= 16000; ++i) peak = std::max(peak, std::abs(sample(w, i * 1e-4).phi_d));
        const bool ok = std::abs(s0.phi_d) < 1e-15 && std::abs(s0.phi_d_dot) < 1e-12 &&
                        std::abs(s0.phi_d_ddot) < 1e-12 && std::abs(peak - 0.4) < 1e-6;
        return CheckResult{{}, ok, "peak " + detail::fmt(peak) + " rad, rest start"};
    });

    check("reference.spline_knots", [&] {
        std::vector<double> t{0.0, 0.3, 0.7, 1.0, 1.6}, y{0.0, 0.2, -0.1, 0.05, 0.3};
        const NaturalCubicSpline sp(t, y);
        double worst = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(sp(t[i]).y - y[i]));
        return CheckResult{{}, worst <= 1e-14, "max knot deviation " + detail::fmt(worst)};
    });

    check("controller.filter_no_spike", [&] {
        const double tau = base.controller.deriv_filter_tau, dt = base.controller.update_period;
        FilterMemory mem;
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double sample = i < 10 ? 0.3 : 0.8;
            auto [est, next] = filtered_derivative(sample, dt, tau, mem);
            mem = next;
            worst = std::max(worst, std::abs(est) - std::abs(sample) / tau);
        }
        return CheckResult{{}, worst <= 1e-12, "estimate never exceeds |sample|/tau"};
    });

    check("controller.reaching", [&] {
        const auto samples = run_ideal_inner_loop(p, g, base.gains, base.controller, ConstantReference{0.2}, 0.0,
                                                  0.0, 2.0, base.dt_plant);
        const double band = chattering_band(base.gains, base.controller);
        double reach = -1.0;
        long increases = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (reach < 0.0 && std::abs(samples[i].sigma) < 0.01) reach = samples[i].t;
            if (i > 0 && std::abs(samples[i - 1].sigma) > band && samples[i].lyapunov > samples[i - 1].lyapunov)
                ++increases;
        }
        const bool ok = reach >= 0.0 && reach <= 2.0 && increases == 0;
        return CheckResult{{}, ok, "|sigma| < 0.01 at t = " + detail::fmt(reach) + " s, " + std::to_string(increases) +
                                       " V increases outside the band"};
    });

    check("motor.reduction", [&] {
        const auto red = reduce_motor_model(MotorParams{});
        const double rel = std::abs(red.c_v - 47.535) / 47.535;
        const double neglect = red.neglect_ratio(2.0 * 2.0 * std::numbers::pi / 1.6);
        return CheckResult{{}, rel < 0.01 && neglect < 0.01,
                           "c_v " + detail::fmt(red.c_v) + " (" + detail::fmt(100 * rel) + "% off), A2 share " +
                               detail::fmt(100 * neglect) + "%"};
    });

    return report;
}

}  // namespace sea
