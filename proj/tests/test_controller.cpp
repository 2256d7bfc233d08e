#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sea/controller.hpp"
#include "sea/simulator.hpp"

using namespace sea;

namespace {

const LinkGeometry kGeom = nominal_geometry();
const PlantParams kPlant{};

}  // namespace

TEST(Controller, SwitchingFunction) {
    EXPECT_EQ(switching(0.0, 0.0), 0.0);
    EXPECT_EQ(switching(1e-300, 0.0), 1.0);
    EXPECT_EQ(switching(-3.0, 0.0), -1.0);
    EXPECT_DOUBLE_EQ(switching(0.05, 0.1), 0.5);
    EXPECT_EQ(switching(0.5, 0.1), 1.0);
    EXPECT_EQ(switching(-0.5, 0.1), -1.0);
}

TEST(Controller, SlidingVariable) { EXPECT_DOUBLE_EQ(sliding_sigma(0.1, -0.2, 10.0), 0.8); }

TEST(Controller, SwitchingTermIsolation) {
    const TrajectorySample ref{0.0, 0.2, 0.0, 0.0};
    const ControllerGains gains;
    ControllerConfig cfg;
    const PlantState s{0.1, 0.0, 0.0, 0.0};
    const double g = joint_input_gain(kPlant, kGeom, s.phi);
    // sigma > 0 here, so the switching term adds rho / g
    const double base = (ref.phi_d_ddot - joint_drift(kPlant, kGeom, s.phi, s.phi_dot, 0.0)) / g;
    EXPECT_NEAR(smc_virtual_control(ref, s, kPlant, kGeom, gains, cfg), base + gains.rho / g, 1e-15);

    cfg.boundary_layer = 0.1;
    ControllerGains small = gains;
    small.c = 0.5;  // sigma = 0.5 * 0.1 = 0.05 -> sat = 0.5
    EXPECT_NEAR(smc_virtual_control(ref, s, kPlant, kGeom, small, cfg), base + 0.5 * gains.rho / g, 1e-15);
}

// With the spring holding u_x exactly, the closed joint loop obeys
// sigma' = -rho sign(sigma).
TEST(Controller, IdealInnerLoopReachingLaw) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const ControllerGains gains;
    const ControllerConfig cfg;
    for (int i = 0; i < 1000; ++i) {
        const TrajectorySample ref{0.0, 0.4 * u(rng), u(rng), 5 * u(rng)};
        PlantState s{0.8 * u(rng), u(rng), 0.0, 0.0};
        s.delta = smc_virtual_control(ref, s, kPlant, kGeom, gains, cfg);
        const double phi_dd = joint_accel(kPlant, kGeom, s, 0.0);
        const double e1 = ref.phi_d - s.phi, e2 = ref.phi_d_dot - s.phi_dot;
        const double sigma = sliding_sigma(e1, e2, gains.c);
        const double sigma_dot = (ref.phi_d_ddot - phi_dd) + gains.c * e2;
        EXPECT_NEAR(sigma_dot, -gains.rho * switching(sigma, 0.0), 1e-9);
    }
}

// U_eq makes the deflection error obey z2~' = -k2 z2~ - z1~ with the
// derivative estimates taken as exact.
TEST(Controller, SecondStageClosesSpringLoop) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const PlantState s{0.8 * u(rng), u(rng), 0.005 * u(rng), 0.1 * u(rng)};
        const double u_x = 0.005 * u(rng), u1 = 0.1 * u(rng), u1_dot = u(rng), k2 = 5.0;
        const double f2 = spring_drift(kPlant, kGeom, s);
        const double ueq = control_voltage(u1, u1_dot, u_x, s.delta, s.delta_dot, f2, k2);
        const double dd = sea_accel(kPlant, kGeom, s, ueq);
        const double z2 = u1 - s.delta_dot, z1 = u_x - s.delta;
        EXPECT_NEAR(u1_dot - dd, -k2 * z2 - z1, 1e-9);
    }
}

TEST(Controller, FirstStageTerms) {
    EXPECT_DOUBLE_EQ(backstep_u1(0.01, 0.2, 0.004, 0.5, -3e5, 2.0), 2.0 * 0.006 + 0.2 + 0.5 * -3e5);
    EXPECT_DOUBLE_EQ(backstep_u1(0.01, 0.2, 0.004, 0.5, -3e5, 2.0, 1e-7), 2.0 * 0.006 + 0.2 + 1e-7 * 0.5 * -3e5);
}

TEST(Filter, PrimedWithoutSpike) {
    FilterMemory mem;
    auto [est, next] = filtered_derivative(5.0, 1e-3, 1e-3, mem);
    EXPECT_EQ(est, 0.0);
    EXPECT_TRUE(next.primed);
    EXPECT_EQ(next.lagged, 5.0);
}

TEST(Filter, StepResponseBounded) {
    const double tau = 2e-3, dt = 1e-3;
    FilterMemory mem;
    for (int i = 0; i < 200; ++i) {
        const double sample = i < 20 ? 0.0 : 1.0;
        auto [est, next] = filtered_derivative(sample, dt, tau, mem);
        mem = next;
        EXPECT_LE(std::abs(est), std::abs(sample) / tau + 1e-12);
        EXPECT_GE(est, -1e-12);
    }
}

// dt = tau makes the estimate a backward difference; a ramp is then exact
TEST(Filter, RampSlopeRecovered) {
    FilterMemory mem;
    double est = 0.0;
    for (int i = 0; i < 20; ++i) {
        std::tie(est, mem) = filtered_derivative(0.3 * i * 1e-3, 1e-3, 1e-3, mem);
        if (i >= 1) {
            EXPECT_NEAR(est, 0.3, 1e-9);
        }
    }
    // slower filter converges to the same slope
    mem = {};
    for (int i = 0; i < 400; ++i) std::tie(est, mem) = filtered_derivative(0.3 * i * 1e-3, 1e-3, 5e-3, mem);
    EXPECT_NEAR(est, 0.3, 1e-9);
}

TEST(Controller, StepUpdatesState) {
    const ControllerGains gains;
    const ControllerConfig cfg;
    ControllerState cs;
    const TrajectorySample ref{0.0, 0.1, 0.0, 0.0};
    const PlantState s{};
    auto [out, next] = controller_step(ref, s, kPlant, kGeom, gains, cfg, cs);
    EXPECT_EQ(next.updates, 1);
    EXPECT_EQ(out.u_x_dot, 0.0);
    EXPECT_DOUBLE_EQ(out.e1, 0.1);
    EXPECT_DOUBLE_EQ(out.sigma, 1.0);
    EXPECT_DOUBLE_EQ(out.u_eq, next.last_command);
    EXPECT_FALSE(out.clamped);
    // same inputs, same outputs
    auto [again, next2] = controller_step(ref, s, kPlant, kGeom, gains, cfg, cs);
    EXPECT_EQ(again.u_eq, out.u_eq);
    EXPECT_EQ(next2, next);
}

TEST(Controller, VoltageClamp) {
    ControllerConfig cfg;
    cfg.voltage_limit = 0.1;
    auto [out, next] = controller_step({0.0, 0.3, 0.0, 0.0}, {}, kPlant, kGeom, {}, cfg, {});
    EXPECT_TRUE(out.clamped);
    EXPECT_EQ(std::abs(out.u_eq), 0.1);
}

TEST(Controller, SingularGainRefused) {
    const double theta = std::numbers::pi / 2 - kGeom.sigma;
    EXPECT_THROW(checked_input_gain(kPlant, kGeom, phi_from_theta(kGeom, theta)), SingularConfigurationError);
}

TEST(Controller, ConfigValidation) {
    ControllerConfig cfg;
    cfg.deriv_filter_tau = 0.5e-3;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = {};
    cfg.boundary_layer = -1;
    EXPECT_THROW(cfg.validate(), DomainError);
    ControllerGains g;
    g.rho = 0;
    EXPECT_THROW(g.validate(), DomainError);
}

// Sampled V = sigma^2 / 2 decreases outside the chattering band.
TEST(Controller, ReachingFromOffset) {
    const SimConfig cfg;
    const auto samples = run_ideal_inner_loop(cfg.plant, cfg.geometry, cfg.gains, cfg.controller,
                                              ConstantReference{0.2}, 0.0, 0.0, 2.0, cfg.dt_plant);
    const double band = chattering_band(cfg.gains, cfg.controller);
    ASSERT_FALSE(samples.empty());
    EXPECT_NEAR(samples.front().sigma, 10 * 0.2, 1e-15);
    bool reached = false;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        reached = reached || std::abs(samples[i].sigma) < 0.01;
        if (std::abs(samples[i - 1].sigma) > band) {
            EXPECT_LE(samples[i].lyapunov, samples[i - 1].lyapunov);
        }
    }
    EXPECT_TRUE(reached);
}
