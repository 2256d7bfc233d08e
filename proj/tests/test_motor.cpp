#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sea/motor.hpp"

using namespace sea;

namespace {

// A transmission that lands on J_eq = 1.574e-4 with the identified rotor
// inertia: n = 10, l = 2 mm, 90 % efficiencies, 0.5 kg nut; J_s fills the rest.
MotorParams consistent_transmission() {
    MotorParams mp;
    mp.n = 10.0;
    mp.lead = 0.002;
    mp.eta1 = 0.9;
    mp.eta2 = 0.9;
    mp.m0 = 0.5;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double nut = 0.002 * 0.002 * 0.5 / (4 * pi2 * 100 * 0.9 * 0.9);
    mp.J_s = (1.574e-4 - mp.J_M - nut) * 100 * 0.9;
    return mp;
}

}  // namespace

TEST(Motor, NominalVelocityCoefficient) {
    const ReducedMotorModel red = reduce_motor_model(MotorParams{});
    // hand evaluation of (B_M R + K_EMF K_T) / (R J_eq + L B_M)
    const double expected = (16.5e-5 * 5.56 + 0.202 * 0.202) / (5.56 * 1.574e-4 + 4.6e-3 * 16.5e-5);
    EXPECT_NEAR(red.c_v, expected, 1e-12 * expected);
    EXPECT_LT(std::abs(red.c_v - 47.535) / 47.535, 0.01);
}

TEST(Motor, Coefficients) {
    const ReducedMotorModel red = reduce_motor_model(MotorParams{});
    EXPECT_DOUBLE_EQ(red.A2, 4.6e-3 * 1.574e-4);
    EXPECT_DOUBLE_EQ(red.A1, 5.56 * 1.574e-4 + 4.6e-3 * 16.5e-5);
    EXPECT_DOUBLE_EQ(red.A0, 16.5e-5 * 5.56 + 0.202 * 0.202);
    EXPECT_DOUBLE_EQ(red.electrical_pole, red.A1 / red.A2);
    EXPECT_FALSE(red.prefactor.has_value());
}

TEST(Motor, DroppedInductanceTermIsSmall) {
    const ReducedMotorModel red = reduce_motor_model(MotorParams{});
    const double gait_rate = 2.0 * 2.0 * std::numbers::pi / 1.6;
    EXPECT_LT(red.neglect_ratio(gait_rate), 0.01);
    // grows linearly with the rate
    EXPECT_NEAR(red.neglect_ratio(2 * gait_rate), 2 * red.neglect_ratio(gait_rate), 1e-15);
}

TEST(Motor, ZeroInductanceHasNoElectricalPole) {
    MotorParams mp;
    mp.L_ind = 0.0;
    const ReducedMotorModel red = reduce_motor_model(mp);
    EXPECT_EQ(red.A2, 0.0);
    EXPECT_TRUE(std::isinf(red.electrical_pole));
    EXPECT_EQ(red.neglect_ratio(10.0), 0.0);
}

TEST(Motor, EquivalentInertiaFromTransmission) {
    MotorParams mp = consistent_transmission();
    mp.J_eq.reset();
    const ReducedMotorModel red = reduce_motor_model(mp);
    EXPECT_NEAR(red.J_eq, 1.574e-4, 1e-12);
    ASSERT_TRUE(red.prefactor.has_value());
    EXPECT_NEAR(*red.prefactor, 2 * std::numbers::pi * 10 / (0.002 * 0.202), 1e-9);
}

TEST(Motor, SuppliedAndDerivedInertiaMustAgree) {
    MotorParams mp = consistent_transmission();
    EXPECT_NO_THROW(reduce_motor_model(mp));  // J_eq = 1.574e-4 supplied as well
    mp.J_eq = 2e-4;
    EXPECT_THROW(reduce_motor_model(mp), DomainError);
}

TEST(Motor, InertiaRequired) {
    MotorParams mp;
    mp.J_eq.reset();
    EXPECT_THROW(reduce_motor_model(mp), DomainError);
}

TEST(Motor, RejectsInvalidConstants) {
    MotorParams mp;
    mp.R = 0.0;
    EXPECT_THROW(reduce_motor_model(mp), DomainError);
    mp = {};
    mp.B_M = -1e-5;
    EXPECT_THROW(reduce_motor_model(mp), DomainError);
    mp = consistent_transmission();
    mp.eta1 = 0.0;
    EXPECT_THROW(reduce_motor_model(mp), DomainError);
}

TEST(Motor, EquivalentInertiaFormula) {
    const double j = equivalent_inertia(1e-4, 2e-5, 1.0, 5.0, 0.004, 0.8, 0.7);
    const double expected = 1e-4 + 2e-5 / (25 * 0.8) + 0.004 * 0.004 / (4 * std::numbers::pi * std::numbers::pi * 25 * 0.8 * 0.7);
    EXPECT_NEAR(j, expected, 1e-18);
}
