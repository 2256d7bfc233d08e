#pragma once

// DC motor + gearbox + ball screw, reduced to the first-order velocity channel
// that drives the SEA spring base:
//
//   U* = P (A2 v0'' + A1 v0' + A0 v0),   P = 2 pi n / (l K_T)
//
// Dropping A2 and dividing by A1 leaves U = v0' + c_v v0.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "sea/errors.hpp"

namespace sea {

struct MotorParams {
    double R{5.56};          ///< armature resistance, ohm
    double L_ind{4.6e-3};    ///< armature inductance, H
    double K_T{0.202};       ///< torque constant, N m / A
    double K_EMF{0.202};     ///< back-EMF constant, V s / rad
    double J_M{1.57e-4};     ///< rotor inertia, kg m^2
    double B_M{16.5e-5};     ///< rotor viscous friction, N m s / rad
    std::optional<double> J_s;   ///< screw inertia, kg m^2
    std::optional<double> m0;    ///< nut + spring base mass, kg
    std::optional<double> n;     ///< gearbox ratio
    std::optional<double> lead;  ///< screw lead, m
    std::optional<double> eta1;  ///< gearbox efficiency
    std::optional<double> eta2;  ///< screw efficiency
    std::optional<double> J_eq{1.574e-4};  ///< equivalent inertia, kg m^2

    bool has_transmission() const { return J_s && m0 && n && lead && eta1 && eta2; }
};

/// Motor-side inertia with the screw and nut reflected through the gearbox.
inline double equivalent_inertia(double J_M, double J_s, double m0, double n, double lead, double eta1, double eta2) {
    return J_M + J_s / (n * n * eta1) +
           lead * lead * m0 / (4.0 * std::numbers::pi * std::numbers::pi * n * n * eta1 * eta2);
}

struct ReducedMotorModel {
    double J_eq{};  ///< inertia actually used
    double A2{};    ///< L J_eq, multiplies v0''
    double A1{};    ///< R J_eq + L B_M, multiplies v0'
    double A0{};    ///< B_M R + K_EMF K_T, multiplies v0
    double c_v{};   ///< A0 / A1, s^-1
    double electrical_pole{};  ///< A1 / A2, rad/s (infinite when L = 0)
    std::optional<double> prefactor;  ///< 2 pi n / (l K_T) when n and l are known

    /// |A2 s^2| / |A1 s| at rate s: the share of the dropped term relative to
    /// the kept inertial term.
    double neglect_ratio(double rate) const { return A1 > 0.0 ? A2 * rate / A1 : 0.0; }
};

inline ReducedMotorModel reduce_motor_model(const MotorParams& mp) {
    auto positive = [](const char* name, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(name, "must be > 0, got " + std::to_string(v));
    };
    auto non_negative = [](const char* name, double v) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(name, "must be >= 0, got " + std::to_string(v));
    };
    positive("motor.R", mp.R);
    non_negative("motor.L", mp.L_ind);
    non_negative("motor.K_T", mp.K_T);
    non_negative("motor.K_EMF", mp.K_EMF);
    positive("motor.J_M", mp.J_M);
    non_negative("motor.B_M", mp.B_M);

    ReducedMotorModel out;
    if (mp.has_transmission()) {
        positive("motor.J_s", *mp.J_s);
        positive("motor.m0", *mp.m0);
        positive("motor.n", *mp.n);
        positive("motor.lead", *mp.lead);
        positive("motor.eta1", *mp.eta1);
        positive("motor.eta2", *mp.eta2);
        out.J_eq = equivalent_inertia(mp.J_M, *mp.J_s, *mp.m0, *mp.n, *mp.lead, *mp.eta1, *mp.eta2);
        if (mp.J_eq && std::abs(*mp.J_eq - out.J_eq) > 1e-3 * out.J_eq)
            throw DomainError("motor.J_eq", "supplied J_eq " + std::to_string(*mp.J_eq) +
                                                " disagrees with the transmission parameters (" +
                                                std::to_string(out.J_eq) + ")");
    } else if (mp.J_eq) {
        positive("motor.J_eq", *mp.J_eq);
        out.J_eq = *mp.J_eq;
    } else {
        throw DomainError("motor.J_eq", "required unless J_s, m0, n, lead, eta1 and eta2 are all given");
    }

    out.A2 = mp.L_ind * out.J_eq;
    out.A1 = mp.R * out.J_eq + mp.L_ind * mp.B_M;
    out.A0 = mp.B_M * mp.R + mp.K_EMF * mp.K_T;
    out.c_v = out.A0 / out.A1;
    out.electrical_pole = out.A2 > 0.0 ? out.A1 / out.A2 : std::numeric_limits<double>::infinity();
    if (mp.n && mp.lead && mp.K_T > 0.0) out.prefactor = 2.0 * std::numbers::pi * *mp.n / (*mp.lead * mp.K_T);
    return out;
}

}  // namespace sea
