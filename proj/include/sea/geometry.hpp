#pragma once

// Planar hip linkage: the limb E-D-C rotates about the hip pivot E, the SEA
// spans from the frame point B to the limb point C. theta is the angle of the
// CE line, phi = theta + alpha is the joint angle.

#include <cmath>
#include <numbers>
#include <string>

#include "sea/errors.hpp"

namespace sea {

/// Moment arms smaller than this (in meters) are treated as singular.
inline constexpr double kSingularArm = 1e-6;

struct LinkGeometry {
    // measured
    double d1{};  ///< CD
    double d2{};  ///< DF
    double d3{};  ///< FE, pivot to limb center of mass
    double d4{};  ///< EA
    double d5{};  ///< AB
    // derived
    double d6{};     ///< CE
    double d7{};     ///< EB
    double alpha{};  ///< offset between CE and the limb axis
    double sigma{};  ///< angle of EB inside the length/arm formulas
};

/// Builds the linkage from the five measured segment lengths.
inline LinkGeometry derive_geometry(double d1, double d2, double d3, double d4, double d5) {
    auto require_positive = [](const char* name, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(name, "must be a positive length, got " + std::to_string(v));
    };
    require_positive("d2", d2);
    require_positive("d3", d3);
    require_positive("d4", d4);
    require_positive("d5", d5);
    // d1 = 0 is the straight-link limit and is still well defined.
    if (!(d1 >= 0.0) || !std::isfinite(d1)) throw DomainError("d1", "must be a non-negative length, got " + std::to_string(d1));

    LinkGeometry g;
    g.d1 = d1;
    g.d2 = d2;
    g.d3 = d3;
    g.d4 = d4;
    g.d5 = d5;
    g.d6 = std::hypot(d1, d2 + d3);
    g.d7 = std::hypot(d4, d5);
    g.alpha = std::atan(d1 / (d2 + d3));
    g.sigma = std::atan(d4 / d5);
    return g;
}

/// Table I link lengths.
inline LinkGeometry nominal_geometry() { return derive_geometry(0.0280, 0.0525, 0.0525, 0.0350, 0.1180); }

/// Distance between the SEA mounting points B and C.
inline double sea_length(const LinkGeometry& g, double theta) {
    const double radicand = g.d4 * g.d4 + g.d5 * g.d5 + g.d6 * g.d6 +
                            2.0 * g.d6 * (g.d5 * std::sin(theta) + g.d4 * std::cos(theta));
    if (!(radicand > 0.0)) throw DomainError("theta", "SEA length radicand is not positive (" + std::to_string(radicand) + ")");
    return std::sqrt(radicand);
}

/// dL/dtheta.
inline double sea_length_derivative(const LinkGeometry& g, double theta) {
    return g.d6 * (g.d5 * std::cos(theta) - g.d4 * std::sin(theta)) / sea_length(g, theta);
}

/// Signed perpendicular distance from the pivot E to the SEA line of action.
/// Multiplying the SEA force by it gives the joint torque.
inline double moment_arm(const LinkGeometry& g, double theta) {
    return g.d6 * g.d7 * std::sin(theta + g.sigma + std::numbers::pi / 2.0) / sea_length(g, theta);
}

inline double theta_from_phi(const LinkGeometry& g, double phi) { return phi - g.alpha; }
inline double phi_from_theta(const LinkGeometry& g, double theta) { return theta + g.alpha; }

/// Force along the SEA that balances the gravity torque m g d3 sin(phi).
inline double gravity_reaction_force(const LinkGeometry& g, double mass, double gravity, double phi) {
    const double theta = theta_from_phi(g, phi);
    const double arm = moment_arm(g, theta);
    if (std::abs(arm) < kSingularArm) throw SingularConfigurationError(theta, arm);
    return mass * gravity * g.d3 * std::sin(phi) / arm;
}

struct OperatingRange {
    double theta_min{-1.2};
    double theta_max{1.2};

    bool contains(double theta) const { return theta >= theta_min && theta <= theta_max; }
};

/// Throws if the linkage is singular or violates the triangle bounds anywhere
/// in `range` (checked on a dense grid).
inline void check_operating_range(const LinkGeometry& g, const OperatingRange& range, int samples = 2001) {
    if (!(range.theta_max > range.theta_min)) throw DomainError("geometry.theta_max", "must exceed geometry.theta_min");
    const double lower = std::abs(g.d7 - g.d6) + 1e-9;
    const double upper = g.d6 + g.d7;
    for (int i = 0; i < samples; ++i) {
        const double theta = range.theta_min + (range.theta_max - range.theta_min) * i / (samples - 1);
        const double len = sea_length(g, theta);
        if (len < lower || len > upper * (1.0 + 1e-12))
            throw DomainError("theta", "SEA length " + std::to_string(len) + " m violates triangle bounds");
        const double arm = moment_arm(g, theta);
        if (std::abs(arm) < kSingularArm) throw SingularConfigurationError(theta, arm);
    }
}

}  // namespace sea
