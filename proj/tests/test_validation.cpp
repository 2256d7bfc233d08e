#include <gtest/gtest.h>

#include <sstream>

#include "sea/validation.hpp"

using namespace sea;

namespace {

const CheckResult* find(const ValidationReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return &c;
    return nullptr;
}

}  // namespace

TEST(Validation, DefaultsAllPass) {
    const ValidationReport r = run_validation_suite();
    std::ostringstream out;
    r.print(out);
    EXPECT_TRUE(r.passed()) << out.str();
    EXPECT_GE(r.checks.size(), 17u);
    EXPECT_EQ(out.str().find("FAIL"), std::string::npos);
}

// a 0.1 % error in a derived length must be caught by the coordinate oracle
TEST(Validation, PerturbedGeometryDetected) {
    ValidationOptions opt;
    opt.base.geometry.d6 *= 1.001;
    const ValidationReport r = run_validation_suite(opt);
    EXPECT_FALSE(r.passed());
    ASSERT_TRUE(find(r, "geometry.law_of_cosines"));
    EXPECT_FALSE(find(r, "geometry.law_of_cosines")->passed);
}

TEST(Validation, CoarseStepDetected) {
    ValidationOptions opt;
    opt.base.dt_plant = 0.1;
    const ValidationReport r = run_validation_suite(opt);
    EXPECT_FALSE(r.passed());
    EXPECT_FALSE(find(r, "integrator.spring_closed_form")->passed);
    EXPECT_FALSE(find(r, "simulator.dt_halving")->passed);
}

TEST(Validation, OracleAgreesOnDefaults) {
    const SimConfig cfg;
    const GeometryDeviation d = geometry_oracle_deviation(cfg.geometry, cfg.range, 2000, 1, cfg.plant.k);
    EXPECT_LT(d.length, 1e-12);
    EXPECT_LT(d.arm, 1e-12);
    EXPECT_LT(d.torque, 1e-12);
}

TEST(Validation, RichardsonOrderNearFour) {
    const SimConfig cfg;
    EXPECT_NEAR(richardson_order(cfg.plant, cfg.geometry, 20 * cfg.dt_plant), 4.0, 0.25);
}
