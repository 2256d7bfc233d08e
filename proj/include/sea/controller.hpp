#pragma once

// Sliding-mode virtual control with two backstepping stages.
//
//   sigma = e2 + c e1,                    e1 = phi_d - phi
//   u_x   = [rho sw(sigma) + phi_d'' - f + c (phi_d' - phi')] / g(phi)
//   u_1   = k1 (u_x - z1) + u_x' + w sigma g(phi)
//   U_eq  = -f2 + k2 (u_1 - z2) + u_1' + (u_x - z1)
//
// with z1 = delta, z2 = delta', f2 the spring drift and sw() either sign() or
// a saturation of width `boundary_layer`. The weight w scales the coupling
// term of the first stage; it corresponds to the Lyapunov function
// V1 = sigma^2/2 + (u_x - z1)^2 / (2 w), and w = 1 is the unweighted form.

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>

#include "sea/errors.hpp"
#include "sea/geometry.hpp"
#include "sea/plant.hpp"
#include "sea/reference.hpp"

namespace sea {

struct ControllerGains {
    double c{10.0};
    double rho{3.0};
    double k1{1.0};
    double k2{5.0};

    void validate() const {
        if (!(c > 0.0)) throw DomainError("gains.c", "must be > 0");
        if (!(rho > 0.0)) throw DomainError("gains.rho", "must be > 0");
        if (!(k1 > 0.0)) throw DomainError("gains.k1", "must be > 0");
        if (!(k2 > 0.0)) throw DomainError("gains.k2", "must be > 0");
    }
};

struct ControllerConfig {
    double update_period{1e-3};     ///< s, zero-order hold between updates
    double deriv_filter_tau{1e-3};  ///< s, dirty-derivative time constant
    double boundary_layer{0.0};     ///< sigma width of the saturation, 0 = sign()
    double nominal_tau_d{0.0};      ///< N m, disturbance assumed by the model terms
    double coupling_weight{8.5e-8};   ///< w in the first backstepping stage
    double voltage_limit{0.0};      ///< |U_eq| clamp, 0 = unlimited

    void validate() const {
        if (!(update_period > 0.0)) throw DomainError("controller.update_period", "must be > 0");
        if (!(deriv_filter_tau >= update_period * (1.0 - 1e-12)))
            throw DomainError("controller.deriv_filter_tau", "must be >= controller.update_period");
        if (!(boundary_layer >= 0.0)) throw DomainError("controller.boundary_layer", "must be >= 0");
        if (!std::isfinite(nominal_tau_d)) throw DomainError("controller.nominal_tau_d", "must be finite");
        if (!(coupling_weight >= 0.0) || !std::isfinite(coupling_weight))
            throw DomainError("controller.coupling_weight", "must be >= 0");
        if (!(voltage_limit >= 0.0)) throw DomainError("controller.voltage_limit", "must be >= 0");
    }
};

struct FilterMemory {
    double lagged{0.0};
    bool primed{false};

    friend bool operator==(const FilterMemory&, const FilterMemory&) = default;
};

/// Dirty derivative: the estimate is (sample - lagged) / tau and `lagged`
/// follows the sample through a first-order lag of time constant tau.
/// An unprimed memory is seeded with the first sample, which therefore
/// yields a zero estimate instead of a sample / tau spike.
inline std::pair<double, FilterMemory> filtered_derivative(double sample, double dt, double tau, FilterMemory mem) {
    if (!mem.primed) {
        mem.lagged = sample;
        mem.primed = true;
    }
    const double estimate = (sample - mem.lagged) / tau;
    mem.lagged += dt * estimate;
    return {estimate, mem};
}

struct ControllerState {
    FilterMemory u_x_filter;
    FilterMemory u1_filter;
    double last_command{0.0};
    double last_time{0.0};
    long updates{0};

    void reset() { *this = ControllerState{}; }

    friend bool operator==(const ControllerState&, const ControllerState&) = default;
};

/// Everything computed during one controller update.
struct ControllerOutput {
    double e1{};
    double e2{};
    double sigma{};
    double g_x1{};
    double u_x{};
    double u_x_dot{};
    double u1{};
    double u1_dot{};
    double f2{};
    double u_eq{};
    bool clamped{false};
};

inline double sliding_sigma(double e1, double e2, double c) { return e2 + c * e1; }

/// sign() with sign(0) = 0, or sat(sigma / width) when width > 0.
inline double switching(double sigma, double boundary_layer) {
    if (boundary_layer > 0.0) return std::clamp(sigma / boundary_layer, -1.0, 1.0);
    return static_cast<double>((sigma > 0.0) - (sigma < 0.0));
}

/// Input gain g(phi), refusing near-singular configurations.
inline double checked_input_gain(const PlantParams& p, const LinkGeometry& geom, double phi) {
    const double theta = theta_from_phi(geom, phi);
    const double arm = moment_arm(geom, theta);
    if (std::abs(arm) < kSingularArm) throw SingularConfigurationError(theta, arm);
    return -p.k * arm / (p.m * geom.d3 * geom.d3);
}

/// Deflection that the sliding-mode stage asks the spring to hold.
inline double smc_virtual_control(const TrajectorySample& ref, const PlantState& s, const PlantParams& p,
                                  const LinkGeometry& geom, const ControllerGains& gains, const ControllerConfig& cfg) {
    const double e1 = ref.phi_d - s.phi;
    const double e2 = ref.phi_d_dot - s.phi_dot;
    const double sigma = sliding_sigma(e1, e2, gains.c);
    const double g = checked_input_gain(p, geom, s.phi);
    const double f = joint_drift(p, geom, s.phi, s.phi_dot, cfg.nominal_tau_d);
    return (gains.rho * switching(sigma, cfg.boundary_layer) + ref.phi_d_ddot - f + gains.c * e2) / g;
}

inline double backstep_u1(double u_x, double u_x_dot, double z1, double sigma, double g_x1, double k1,
                          double coupling_weight = 1.0) {
    return k1 * (u_x - z1) + u_x_dot + coupling_weight * sigma * g_x1;
}

/// Reduced-channel command; g2 = 1 so no division is needed.
inline double control_voltage(double u1, double u1_dot, double u_x, double z1, double z2, double f2, double k2) {
    return -f2 + k2 * (u1 - z2) + u1_dot + (u_x - z1);
}

/// One sampled update: errors, sigma, u_x, u_x', u_1, u_1', U_eq.
inline std::pair<ControllerOutput, ControllerState> controller_step(const TrajectorySample& ref,
                                                                    const PlantState& measured, const PlantParams& p,
                                                                    const LinkGeometry& geom,
                                                                    const ControllerGains& gains,
                                                                    const ControllerConfig& cfg, ControllerState cs) {
    ControllerOutput out;
    const double dt = cfg.update_period;
    const double tau = cfg.deriv_filter_tau;

    out.e1 = ref.phi_d - measured.phi;
    out.e2 = ref.phi_d_dot - measured.phi_dot;
    out.sigma = sliding_sigma(out.e1, out.e2, gains.c);
    out.g_x1 = checked_input_gain(p, geom, measured.phi);
    out.u_x = smc_virtual_control(ref, measured, p, geom, gains, cfg);

    std::tie(out.u_x_dot, cs.u_x_filter) = filtered_derivative(out.u_x, dt, tau, cs.u_x_filter);
    out.u1 = backstep_u1(out.u_x, out.u_x_dot, measured.delta, out.sigma, out.g_x1, gains.k1, cfg.coupling_weight);
    std::tie(out.u1_dot, cs.u1_filter) = filtered_derivative(out.u1, dt, tau, cs.u1_filter);

    out.f2 = spring_drift(p, geom, measured);
    out.u_eq = control_voltage(out.u1, out.u1_dot, out.u_x, measured.delta, measured.delta_dot, out.f2, gains.k2);
    if (cfg.voltage_limit > 0.0 && std::abs(out.u_eq) > cfg.voltage_limit) {
        out.u_eq = std::copysign(cfg.voltage_limit, out.u_eq);
        out.clamped = true;
    }

    cs.last_command = out.u_eq;
    cs.last_time = ref.t;
    ++cs.updates;
    return {out, cs};
}

}  // namespace sea
