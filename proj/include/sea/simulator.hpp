#pragma once

// Closed-loop runs: RK4 plant integration at dt_plant, controller sampled
// every update_period with its command held in between.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "sea/controller.hpp"
#include "sea/errors.hpp"
#include "sea/geometry.hpp"
#include "sea/integrator.hpp"
#include "sea/plant.hpp"
#include "sea/reference.hpp"

namespace sea {

struct MetricSettings {
    double error_band{0.02};          ///< rad, settling band for transient_time
    double hold_time{0.2};            ///< s the error must stay inside the band
    double final_fraction{0.2};       ///< tail share of the run used for steady-state metrics
    double transient_exclusion{0.5};  ///< s excluded before max_abs_error_after_transient
    std::optional<double> step_size;  ///< set for step references; enables overshoot
};

struct SimConfig {
    double dt_plant{1e-4};
    double duration{8.0};
    int decimation{10};
    double divergence_threshold{1e6};

    PlantState initial{};
    PlantParams plant{};
    LinkGeometry geometry{nominal_geometry()};
    OperatingRange range{};
    ControllerGains gains{};
    ControllerConfig controller{};
    DisturbanceProfile disturbance{};
    ReferenceSource reference{default_walking_cycle()};
    MetricSettings metrics{};

    bool controller_enabled{true};  ///< false: U_eq held at 0
    bool freeze_spring{false};      ///< true: delta stays at its initial value

    long plant_steps() const { return std::lround(duration / dt_plant); }
    long steps_per_update() const { return std::lround(controller.update_period / dt_plant); }

    void validate() const {
        if (!(dt_plant > 0.0) || !std::isfinite(dt_plant)) throw DomainError("sim.dt_plant", "must be > 0");
        if (!(duration > 0.0) || !std::isfinite(duration)) throw DomainError("sim.duration", "must be > 0");
        if (decimation < 1) throw DomainError("sim.decimation", "must be >= 1");
        if (!(divergence_threshold > 0.0)) throw DomainError("sim.divergence_threshold", "must be > 0");
        plant.validate();
        gains.validate();
        controller.validate();
        disturbance.validate();
        const double ratio = controller.update_period / dt_plant;
        if (std::lround(ratio) < 1 || std::abs(ratio - static_cast<double>(std::lround(ratio))) > 1e-9 * ratio)
            throw DomainError("controller.update_period", "must be an integer multiple of sim.dt_plant");
        if (const auto* w = std::get_if<WalkingCycle>(&reference); w && duration < w->period * (1.0 - 1e-12))
            throw DomainError("sim.duration", "must cover at least one reference period");
        if (const auto* s = std::get_if<SineReference>(&reference);
            s && s->frequency > 0.0 && duration * s->frequency < 1.0 - 1e-12)
            throw DomainError("sim.duration", "must cover at least one reference period");
        check_operating_range(geometry, range);
        const double peak = reference_peak(reference);
        if (!range.contains(peak - geometry.alpha) || !range.contains(-peak - geometry.alpha))
            throw DomainError("reference", "reference amplitude " + std::to_string(peak) +
                                               " rad leaves the operating range");
        if (!range.contains(theta_from_phi(geometry, initial.phi)))
            throw DomainError("initial.phi", "outside the operating range");
    }
};

struct TraceRecord {
    double t{};
    double phi_d{};
    double phi{};
    double e1{};
    double sigma{};
    double delta{};
    double delta_dot{};
    double u_x{};
    double u1{};
    double u_eq{};
    double tau_sea{};
    double tau_d{};
};

struct Window {
    double start{};
    double end{};
};

struct Metrics {
    double transient_time{};
    bool settled{true};  ///< false: the error never stayed in the band long enough
    double max_abs_error_after_transient{};
    Window max_error_window{};
    double steady_state_error{};
    Window steady_window{};
    double overshoot_fraction{};
    bool has_overshoot{false};  ///< only defined for step references
    double sigma_rms_steady{};
};

enum class RunStatus { ok, diverged, singular, out_of_range };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::ok: return "ok";
        case RunStatus::diverged: return "diverged";
        case RunStatus::singular: return "singular";
        case RunStatus::out_of_range: return "out_of_range";
    }
    return "ok";
}

struct RunResult {
    RunStatus status{RunStatus::ok};
    std::string message;
    double failure_time{};
    long clamp_events{};
    std::vector<TraceRecord> trace;
    std::optional<Metrics> metrics;

    bool ok() const { return status == RunStatus::ok; }
};

/// One RK4 step of the plant with U_eq held and tau_D evaluated at stage times.
inline PlantState rk4_step(const PlantParams& p, const LinkGeometry& geom, const PlantState& x, double t, double dt,
                           double held_u_eq, const DisturbanceProfile& disturbance, bool freeze_spring = false) {
    auto field = [&](double tt, const PlantState& s) {
        PlantState d = plant_derivative(p, geom, s, held_u_eq, evaluate_disturbance(disturbance, tt));
        if (freeze_spring) d.delta = d.delta_dot = 0.0;
        return d;
    };
    return rk4_step(field, t, x, dt);
}

inline Metrics compute_metrics(const std::vector<TraceRecord>& trace, const MetricSettings& settings) {
    if (trace.empty()) throw MetricError("empty trace");
    const double t0 = trace.front().t;
    const double t_end = trace.back().t;
    const double span = t_end - t0;
    const double steady_start = t_end - settings.final_fraction * span;

    std::size_t steady_rows = 0;
    for (const auto& r : trace) steady_rows += r.t >= steady_start;
    if (span < settings.hold_time || steady_rows < 2)
        throw MetricError("trace of " + std::to_string(span) + " s is shorter than the steady-state window");

    Metrics m;

    m.settled = false;
    m.transient_time = t_end;
    std::optional<double> run_start;
    for (const auto& r : trace) {
        if (std::abs(r.e1) < settings.error_band) {
            if (!run_start) run_start = r.t;
            if (r.t - *run_start >= settings.hold_time - 1e-12) {
                m.transient_time = *run_start - t0;
                m.settled = true;
                break;
            }
        } else {
            run_start.reset();
        }
    }

    m.max_error_window = {t0 + settings.transient_exclusion, t_end};
    bool any = false;
    for (const auto& r : trace) {
        if (r.t > m.max_error_window.start) {
            m.max_abs_error_after_transient = std::max(m.max_abs_error_after_transient, std::abs(r.e1));
            any = true;
        }
    }
    if (!any) throw MetricError("no samples after the transient exclusion window");

    m.steady_window = {steady_start, t_end};
    double abs_sum = 0.0, sigma_sq = 0.0, phi_sum = 0.0;
    for (const auto& r : trace) {
        if (r.t < steady_start) continue;
        abs_sum += std::abs(r.e1);
        sigma_sq += r.sigma * r.sigma;
        phi_sum += r.phi;
    }
    const auto n = static_cast<double>(steady_rows);
    m.steady_state_error = abs_sum / n;
    m.sigma_rms_steady = std::sqrt(sigma_sq / n);

    if (settings.step_size && *settings.step_size != 0.0) {
        const double step = *settings.step_size;
        const double phi_final = phi_sum / n;
        const double dir = step > 0.0 ? 1.0 : -1.0;
        double peak = 0.0;
        for (const auto& r : trace) peak = std::max(peak, dir * (r.phi - phi_final));
        m.overshoot_fraction = peak / std::abs(step);
        m.has_overshoot = true;
    }
    return m;
}

/// Metric settings adjusted to the reference (overshoot for steps).
inline MetricSettings effective_metric_settings(const SimConfig& cfg) {
    MetricSettings s = cfg.metrics;
    if (const auto* step = std::get_if<StepReference>(&cfg.reference); step && !s.step_size) s.step_size = step->size;
    return s;
}

inline RunResult run_simulation(const SimConfig& cfg) {
    cfg.validate();
    RunResult result;

    const long steps = cfg.plant_steps();
    const long per_update = cfg.steps_per_update();
    const double dt = cfg.dt_plant;
    result.trace.reserve(static_cast<std::size_t>(steps / cfg.decimation + 2));

    PlantState x = cfg.initial;
    ControllerState cs;
    ControllerOutput held;
    double t = 0.0;

    auto finite_and_bounded = [&](const PlantState& s) {
        for (double v : s.as_array())
            if (!std::isfinite(v) || std::abs(v) > cfg.divergence_threshold) return false;
        return true;
    };

    try {
        for (long i = 0;; ++i) {
            t = static_cast<double>(i) * dt;
            if (cfg.controller_enabled && i % per_update == 0) {
                auto [out, next] = controller_step(sample(cfg.reference, t), x, cfg.plant, cfg.geometry, cfg.gains,
                                                   cfg.controller, cs);
                held = out;
                cs = next;
                result.clamp_events += out.clamped;
            }
            if (i % cfg.decimation == 0 || i == steps) {
                const TrajectorySample ref = sample(cfg.reference, t);
                TraceRecord r;
                r.t = t;
                r.phi_d = ref.phi_d;
                r.phi = x.phi;
                r.e1 = ref.phi_d - x.phi;
                r.sigma = sliding_sigma(r.e1, ref.phi_d_dot - x.phi_dot, cfg.gains.c);
                r.delta = x.delta;
                r.delta_dot = x.delta_dot;
                r.u_x = held.u_x;
                r.u1 = held.u1;
                r.u_eq = held.u_eq;
                r.tau_sea = sea_torque(cfg.geometry, cfg.plant.k, x.phi, x.delta);
                r.tau_d = evaluate_disturbance(cfg.disturbance, t);
                result.trace.push_back(r);
            }
            if (i == steps) break;

            x = rk4_step(cfg.plant, cfg.geometry, x, t, dt, held.u_eq, cfg.disturbance, cfg.freeze_spring);
            if (!finite_and_bounded(x))
                throw DivergenceError(t + dt, "state left the bound " + std::to_string(cfg.divergence_threshold));
            if (!cfg.range.contains(theta_from_phi(cfg.geometry, x.phi))) {
                result.status = RunStatus::out_of_range;
                result.failure_time = t + dt;
                result.message = "joint angle " + std::to_string(x.phi) + " rad left the operating range";
                return result;
            }
        }
    } catch (const DivergenceError& e) {
        result.status = RunStatus::diverged;
        result.failure_time = e.time();
        result.message = e.what();
        return result;
    } catch (const SingularConfigurationError& e) {
        result.status = RunStatus::singular;
        result.failure_time = t;
        result.message = e.what();
        return result;
    }

    try {
        result.metrics = compute_metrics(result.trace, effective_metric_settings(cfg));
    } catch (const MetricError& e) {
        result.message = e.what();
    }
    return result;
}

// ---------------------------------------------------------------------------
// gain sweeps

enum class GainAxis { c, rho, k1, k2 };

inline std::optional<GainAxis> parse_gain_axis(std::string_view name) {
    if (name == "c" || name == "gains.c") return GainAxis::c;
    if (name == "rho" || name == "gains.rho") return GainAxis::rho;
    if (name == "k1" || name == "gains.k1") return GainAxis::k1;
    if (name == "k2" || name == "gains.k2") return GainAxis::k2;
    return std::nullopt;
}

inline const char* to_string(GainAxis a) {
    switch (a) {
        case GainAxis::c: return "c";
        case GainAxis::rho: return "rho";
        case GainAxis::k1: return "k1";
        case GainAxis::k2: return "k2";
    }
    return "c";
}

inline double& gain_ref(ControllerGains& g, GainAxis a) {
    switch (a) {
        case GainAxis::c: return g.c;
        case GainAxis::rho: return g.rho;
        case GainAxis::k1: return g.k1;
        case GainAxis::k2: return g.k2;
    }
    return g.c;
}

struct SweepRow {
    double value{};
    RunStatus status{RunStatus::ok};
    std::string message;
    std::optional<Metrics> metrics;
};

/// One independent run per value, executed on up to `jobs` threads. Rows come
/// back in input order; failed runs stay in the table with their status.
inline std::vector<SweepRow> gain_sweep(const SimConfig& base, GainAxis axis, const std::vector<double>& values,
                                        unsigned jobs = 1) {
    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            SimConfig cfg = base;
            gain_ref(cfg.gains, axis) = values[i];
            SweepRow row;
            row.value = values[i];
            try {
                RunResult r = run_simulation(cfg);
                row.status = r.status;
                row.message = r.message;
                row.metrics = r.metrics;
            } catch (const std::exception& e) {
                row.status = RunStatus::diverged;
                row.message = e.what();
            }
            rows[i] = std::move(row);
        }
    };

    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(values.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// ideal inner loop: the spring is assumed to hold u_x exactly

struct ReachingSample {
    double t{};
    double sigma{};
    double lyapunov{};  ///< sigma^2 / 2
};

/// Joint-only simulation with delta replaced by the held sliding-mode command.
/// Returns sigma at every controller instant.
inline std::vector<ReachingSample> run_ideal_inner_loop(const PlantParams& p, const LinkGeometry& geom,
                                                        const ControllerGains& gains, const ControllerConfig& ccfg,
                                                        const ReferenceSource& ref, double phi0, double phi_dot0,
                                                        double duration, double dt_plant,
                                                        const DisturbanceProfile& disturbance = {}) {
    if (!(dt_plant > 0.0)) throw DomainError("sim.dt_plant", "must be > 0");
    const long per_update = std::lround(ccfg.update_period / dt_plant);
    if (per_update < 1) throw DomainError("controller.update_period", "must be an integer multiple of sim.dt_plant");
    const long steps = std::lround(duration / dt_plant);
    std::vector<ReachingSample> out;
    PlantState x{phi0, phi_dot0, 0.0, 0.0};
    for (long i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt_plant;
        if (i % per_update == 0) {
            const auto r = sample(ref, t);
            const double sigma = sliding_sigma(r.phi_d - x.phi, r.phi_d_dot - x.phi_dot, gains.c);
            out.push_back({t, sigma, 0.5 * sigma * sigma});
            x.delta = smc_virtual_control(r, x, p, geom, gains, ccfg);
        }
        x = rk4_step(p, geom, x, t, dt_plant, 0.0, disturbance, true);
    }
    return out;
}

/// Width of the band around sigma = 0 inside which a sampled sign() law
/// chatters: one hold period of full switching effort, both directions.
inline double chattering_band(const ControllerGains& gains, const ControllerConfig& ccfg) {
    return 2.0 * gains.rho * ccfg.update_period;
}

// ---------------------------------------------------------------------------
// CSV output

namespace detail {

inline void put_number(std::ostream& out, double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.write(buf, r.ptr - buf);
}

}  // namespace detail

inline constexpr const char* kTraceHeader = "t,phi_d,phi,e1,sigma,delta,delta_dot,u_x,u1,U_eq,tau_SEA,tau_D";

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
    out << kTraceHeader << '\n';
    for (const auto& r : trace) {
        const double fields[] = {r.t,   r.phi_d, r.phi, r.e1,   r.sigma,   r.delta,
                                 r.delta_dot, r.u_x, r.u1, r.u_eq, r.tau_sea, r.tau_d};
        bool first = true;
        for (double v : fields) {
            if (!first) out << ',';
            detail::put_number(out, v);
            first = false;
        }
        out << '\n';
    }
}

inline constexpr const char* kSweepHeader =
    "axis,value,status,transient_time,settled,max_abs_error_after_transient,steady_state_error,overshoot_fraction,"
    "sigma_rms_steady";

inline void write_sweep_csv(std::ostream& out, GainAxis axis, const std::vector<SweepRow>& rows) {
    out << kSweepHeader << '\n';
    for (const auto& row : rows) {
        out << to_string(axis) << ',';
        detail::put_number(out, row.value);
        out << ',' << to_string(row.status);
        if (row.metrics) {
            const Metrics& m = *row.metrics;
            out << ',';
            detail::put_number(out, m.transient_time);
            out << ',' << (m.settled ? 1 : 0) << ',';
            detail::put_number(out, m.max_abs_error_after_transient);
            out << ',';
            detail::put_number(out, m.steady_state_error);
            out << ',';
            if (m.has_overshoot) detail::put_number(out, m.overshoot_fraction);
            out << ',';
            detail::put_number(out, m.sigma_rms_steady);
        } else {
            out << ",,,,,,";
        }
        out << '\n';
    }
}

}  // namespace sea
