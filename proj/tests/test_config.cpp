#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sea/config.hpp"
#include "sea/digest.hpp"
#include "sea/manifest.hpp"
#include "sea/simulator.hpp"

using namespace sea;

namespace {

ConfigValues from_text(const std::string& text, const std::string& origin = "test.ini") {
    ConfigValues v = default_values();
    std::istringstream in(text);
    apply_config_text(v, in, origin);
    return v;
}

std::string trace_bytes(const SimConfig& cfg) {
    std::ostringstream s;
    write_trace_csv(s, run_simulation(cfg).trace);
    return s.str();
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path, std::ios::binary) << content;
    return path.string();
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
    const SimConfig c = build_sim_config(from_text(""));
    const SimConfig d;
    EXPECT_EQ(c.dt_plant, d.dt_plant);
    EXPECT_EQ(c.duration, d.duration);
    EXPECT_EQ(c.gains.c, d.gains.c);
    EXPECT_EQ(c.gains.rho, d.gains.rho);
    EXPECT_EQ(c.gains.k1, d.gains.k1);
    EXPECT_EQ(c.gains.k2, d.gains.k2);
    EXPECT_EQ(c.plant.k, d.plant.k);
    EXPECT_EQ(c.geometry.d6, d.geometry.d6);
    EXPECT_EQ(c.geometry.alpha, d.geometry.alpha);
    EXPECT_EQ(c.controller.coupling_weight, d.controller.coupling_weight);
    EXPECT_EQ(c.controller.update_period, d.controller.update_period);
    // same run, byte for byte
    SimConfig shorter = c, ref = d;
    shorter.duration = ref.duration = 1.6;
    EXPECT_EQ(trace_bytes(shorter), trace_bytes(ref));
}

TEST(Config, OverrideBeatsFile) {
    ConfigValues v = from_text("[gains]\nc = 20\n");
    apply_override(v, "gains.c=30");
    EXPECT_EQ(build_sim_config(v).gains.c, 30.0);
    EXPECT_EQ(v.at("gains.c").location, "--set");
    EXPECT_EQ(build_sim_config(from_text("[gains]\nc = 20\n")).gains.c, 20.0);
}

TEST(Config, InvalidValueNamesKeyAndLine) {
    try {
        build_sim_config(from_text("[plant]\nk = -1\n", "bad.ini"));
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "plant.k");
        EXPECT_EQ(e.location(), "bad.ini:2");
    }
}

TEST(Config, UnknownKeyRejected) {
    try {
        from_text("# comment\n\ngains.zeta = 1\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "gains.zeta");
        EXPECT_EQ(e.location(), "test.ini:3");
    }
    ConfigValues v = default_values();
    EXPECT_THROW(apply_override(v, "nope=1"), ConfigError);
    EXPECT_THROW(apply_override(v, "gains.c"), ConfigError);
}

TEST(Config, TypeMismatch) {
    EXPECT_THROW(build_sim_config(from_text("gains.c = fast\n")), ConfigError);
    EXPECT_THROW(build_sim_config(from_text("sim.decimation = 2.5\n")), ConfigError);
    EXPECT_THROW(build_sim_config(from_text("sim.controller_enabled = maybe\n")), ConfigError);
    EXPECT_THROW(build_sim_config(from_text("gains.c = nan\n")), ConfigError);
}

TEST(Config, SectionsDottedKeysAndQuotes) {
    const ConfigValues v = from_text(
        "; leading comment\n"
        "gains.rho = 12\n"
        "[reference]\n"
        "kind = \"step\"\n"
        "step_size = 0.25\n"
        "gains.k1 = 3\n");  // dotted key inside a section stays global
    EXPECT_EQ(v.at("gains.rho").value, "12");
    EXPECT_EQ(v.at("reference.kind").value, "step");
    EXPECT_EQ(v.at("reference.step_size").location, "test.ini:5");
    EXPECT_EQ(v.at("gains.k1").value, "3");
    EXPECT_THROW(from_text("[gains\nc = 1\n"), ConfigError);
    EXPECT_THROW(from_text("just words\n"), ConfigError);
}

TEST(Config, InlineCommentIsNotAValue) {
    // values are taken verbatim up to end of line; a trailing comment makes the number invalid
    EXPECT_THROW(build_sim_config(from_text("gains.k1 = 3 # note\n")), ConfigError);
}

TEST(Config, ReferenceKinds) {
    const SimConfig step = build_sim_config(from_text("[reference]\nkind = step\nstep_size = 0.25\n"));
    ASSERT_TRUE(std::holds_alternative<StepReference>(step.reference));
    EXPECT_EQ(std::get<StepReference>(step.reference).size, 0.25);

    const SimConfig gait = build_sim_config(from_text("[reference]\nharmonics = 0.2:0;0.05:1.2\n"));
    ASSERT_TRUE(std::holds_alternative<WalkingCycle>(gait.reference));
    EXPECT_EQ(std::get<WalkingCycle>(gait.reference).harmonics.size(), 2u);

    EXPECT_THROW(build_sim_config(from_text("reference.kind = spiral\n")), ConfigError);
    EXPECT_THROW(build_sim_config(from_text("reference.harmonics = 0.2-0\n")), ConfigError);
}

TEST(Config, WriteReadRoundTrip) {
    ConfigValues v = from_text("gains.c = 12.5\nreference.kind = sine\nreference.amplitude = 0.1\n");
    std::ostringstream out;
    write_config(out, v);
    const ConfigValues back = from_text(out.str(), "echo.ini");
    for (const auto& [key, entry] : v) EXPECT_EQ(back.at(key).value, entry.value) << key;
}

TEST(Config, FileErrors) {
    EXPECT_THROW(resolve_config("/nonexistent/dir/x.ini", {}), ConfigError);
    const std::string path = temp_file("sea_cfg_test.ini", "[gains]\nc = 20\n");
    EXPECT_EQ(parse_config(path).gains.c, 20.0);
    EXPECT_EQ(parse_config(path, {"gains.c=30"}).gains.c, 30.0);
    std::filesystem::remove(path);
}

TEST(Config, SweepSpec) {
    const SweepSpec s = build_sweep_spec(from_text("[sweep]\naxis = rho\nvalues = 3, 30\n"));
    EXPECT_EQ(s.axis, GainAxis::rho);
    EXPECT_EQ(s.values, (std::vector<double>{3, 30}));
    EXPECT_THROW(build_sweep_spec(from_text("sweep.axis = zeta\n")), ConfigError);
    EXPECT_THROW(build_sweep_spec(from_text("sweep.values = 1,-2\n")), ConfigError);
}

TEST(Config, MotorKeys) {
    const ReducedMotorModel red = build_reduced_motor(from_text(""));
    EXPECT_NEAR(red.c_v, 47.63, 0.01);
    EXPECT_THROW(build_reduced_motor(from_text("motor.R = 0\n")), ConfigError);
}

TEST(Config, FormatNumberRoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, 8.5e-8, 1e300, -2.5}) EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Manifest, RoundTripReproducesTrace) {
    ConfigValues v = from_text("gains.c = 12\nsim.duration = 1.6\n");
    RunManifest m;
    m.command = "simulate";
    m.config = v;
    m.status = "ok";
    const auto j = manifest_to_json(m);
    EXPECT_EQ(j["tool"], "sea_sim");
    EXPECT_EQ(j["config"]["gains.c"], "12");
    EXPECT_EQ(j["config"].size(), config_schema().size());

    const ConfigValues back = values_from_manifest(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(trace_bytes(build_sim_config(back)), trace_bytes(build_sim_config(v)));
}

TEST(Manifest, RejectsUnknownOrMalformed) {
    EXPECT_THROW(values_from_manifest(nlohmann::json::parse(R"({"config":{"gains.zeta":"1"}})")), ConfigError);
    EXPECT_THROW(values_from_manifest(nlohmann::json::parse(R"({"config":{"gains.c":1}})")), ConfigError);
    EXPECT_THROW(values_from_manifest(nlohmann::json::parse(R"({"status":"ok"})")), ConfigError);
}

TEST(Digest, KnownVectors) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const std::string path = temp_file("sea_digest_test.txt", "abc");
    EXPECT_EQ(sha256_file(path), sha256_hex("abc"));
    std::filesystem::remove(path);
}
