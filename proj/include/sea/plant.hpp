#pragma once

// Open-loop dynamics of the hip joint driven through the SEA spring:
//
//   m d3^2 phi''  = -m g d3 sin(phi) - B phi' + tau_D + tau_SEA
//   Delta'' = -omega^2 Delta - F_R / m + U_eq
//
// where Delta = X_C - X_0 is the spring deflection and U_eq is the reduced
// actuator input channel.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "sea/errors.hpp"
#include "sea/geometry.hpp"

namespace sea {

struct PlantParams {
    double m{2.0};      ///< limb mass, kg (also the SEA load mass)
    double B{0.5};      ///< joint viscous damping, N m s
    double k{20000.0};  ///< spring stiffness, N/m
    double g{9.81};     ///< gravity, m/s^2

    double omega_sq() const { return k / m; }

    void validate() const {
        if (!(m > 0.0)) throw DomainError("plant.m", "must be > 0");
        if (!(k > 0.0)) throw DomainError("plant.k", "must be > 0");
        if (!(B >= 0.0)) throw DomainError("plant.B", "must be >= 0");
        if (!(g >= 0.0)) throw DomainError("plant.g", "must be >= 0");
    }
};

struct PlantState {
    double phi{};        ///< joint angle, rad
    double phi_dot{};    ///< joint rate, rad/s
    double delta{};      ///< spring deflection, m
    double delta_dot{};  ///< deflection rate, m/s

    friend PlantState operator+(const PlantState& a, const PlantState& b) {
        return {a.phi + b.phi, a.phi_dot + b.phi_dot, a.delta + b.delta, a.delta_dot + b.delta_dot};
    }
    friend PlantState operator*(double s, const PlantState& a) {
        return {s * a.phi, s * a.phi_dot, s * a.delta, s * a.delta_dot};
    }
    friend bool operator==(const PlantState&, const PlantState&) = default;

    std::array<double, 4> as_array() const { return {phi, phi_dot, delta, delta_dot}; }
};

/// Joint torque produced by the SEA for deflection `delta` (force is -k delta).
inline double sea_torque(const LinkGeometry& geom, double k, double phi, double delta) {
    return -k * delta * moment_arm(geom, theta_from_phi(geom, phi));
}

/// Drift term of phi'' = g(phi) * delta + f(phi, phi_dot, tau_D).
inline double joint_drift(const PlantParams& p, const LinkGeometry& geom, double phi, double phi_dot, double tau_d) {
    return -(p.B * phi_dot + p.m * p.g * geom.d3 * std::sin(phi) - tau_d) / (p.m * geom.d3 * geom.d3);
}

/// Input gain of phi'' with respect to the deflection.
inline double joint_input_gain(const PlantParams& p, const LinkGeometry& geom, double phi) {
    return -p.k * moment_arm(geom, theta_from_phi(geom, phi)) / (p.m * geom.d3 * geom.d3);
}

inline double joint_accel(const PlantParams& p, const LinkGeometry& geom, const PlantState& s, double tau_d) {
    const double inertia = p.m * geom.d3 * geom.d3;
    return (-p.m * p.g * geom.d3 * std::sin(s.phi) - p.B * s.phi_dot + tau_d + sea_torque(geom, p.k, s.phi, s.delta)) /
           inertia;
}

/// Drift of the reduced spring dynamics, -omega^2 delta - F_R / m.
inline double spring_drift(const PlantParams& p, const LinkGeometry& geom, const PlantState& s) {
    return -p.omega_sq() * s.delta - gravity_reaction_force(geom, p.m, p.g, s.phi) / p.m;
}

inline double sea_accel(const PlantParams& p, const LinkGeometry& geom, const PlantState& s, double u_eq) {
    return spring_drift(p, geom, s) + u_eq;
}

inline PlantState plant_derivative(const PlantParams& p, const LinkGeometry& geom, const PlantState& s, double u_eq,
                                   double tau_d) {
    return {s.phi_dot, joint_accel(p, geom, s, tau_d), s.delta_dot, sea_accel(p, geom, s, u_eq)};
}

/// Mechanical energy of the joint alone (spring torque excluded).
inline double joint_energy(const PlantParams& p, const LinkGeometry& geom, const PlantState& s) {
    return 0.5 * p.m * geom.d3 * geom.d3 * s.phi_dot * s.phi_dot + p.m * p.g * geom.d3 * (1.0 - std::cos(s.phi));
}

struct DisturbanceProfile {
    enum class Kind { none, constant, sinusoid, pulse };

    Kind kind{Kind::none};
    double amplitude{};  ///< N m
    double frequency{};  ///< Hz, sinusoid only
    double start{};      ///< s, pulse only
    double duration{};   ///< s, pulse only

    static DisturbanceProfile constant_torque(double a) { return {Kind::constant, a, 0.0, 0.0, 0.0}; }
    static DisturbanceProfile sinusoid(double a, double hz) { return {Kind::sinusoid, a, hz, 0.0, 0.0}; }
    static DisturbanceProfile pulse(double a, double t0, double width) { return {Kind::pulse, a, 0.0, t0, width}; }

    void validate() const {
        if (!std::isfinite(amplitude)) throw DomainError("disturbance.amplitude", "must be finite");
        if (kind == Kind::sinusoid && !(frequency >= 0.0)) throw DomainError("disturbance.frequency", "must be >= 0");
        if (kind == Kind::pulse && !(duration >= 0.0 && start >= 0.0))
            throw DomainError("disturbance.duration", "pulse start and duration must be >= 0");
    }
};

inline double evaluate_disturbance(const DisturbanceProfile& d, double t) {
    switch (d.kind) {
        case DisturbanceProfile::Kind::none:
            return 0.0;
        case DisturbanceProfile::Kind::constant:
            return d.amplitude;
        case DisturbanceProfile::Kind::sinusoid:
            return d.amplitude * std::sin(2.0 * std::numbers::pi * d.frequency * t);
        case DisturbanceProfile::Kind::pulse:
            return (t >= d.start && t < d.start + d.duration) ? d.amplitude : 0.0;
    }
    return 0.0;
}

inline const char* to_string(DisturbanceProfile::Kind k) {
    switch (k) {
        case DisturbanceProfile::Kind::none: return "none";
        case DisturbanceProfile::Kind::constant: return "constant";
        case DisturbanceProfile::Kind::sinusoid: return "sinusoid";
        case DisturbanceProfile::Kind::pulse: return "pulse";
    }
    return "none";
}

}  // namespace sea
