// sea_sim: batch front end for the SEA hip joint simulator.
//
//   sea_sim simulate     --config run.ini --out runs/a [--set gains.c=20] [--plot]
//   sea_sim sweep        --config run.ini --out runs/sweep --jobs 4
//   sea_sim reduce-motor [--config motor.ini] [--out dir]
//   sea_sim validate     [--config run.ini] [--out dir]
//
// Exit status: 0 ok, 1 usage, 2 configuration error, 3 run diverged or hit a
// singular / out-of-range configuration, 4 validation failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sea/config.hpp"
#include "sea/digest.hpp"
#include "sea/manifest.hpp"
#include "sea/motor.hpp"
#include "sea/plot.hpp"
#include "sea/simulator.hpp"
#include "sea/validation.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kRunFailed = 3, kValidation = 4 };

struct CommonOptions {
    std::string config;
    std::string out;
    std::vector<std::string> sets;
    unsigned jobs{1};
    std::uint64_t seed{0};  // accepted for interface stability; nothing is random
    bool plot{false};
};

using Clock = std::chrono::steady_clock;

class OutputDir {
public:
    OutputDir(std::string command, const CommonOptions& opt) : start_(Clock::now()) {
        manifest_.command = std::move(command);
        if (!opt.config.empty()) {
            manifest_.config_file = opt.config;
            manifest_.config_digest = sea::sha256_file(opt.config);
        }
        if (!opt.out.empty()) {
            dir_ = opt.out;
            fs::create_directories(*dir_);
        }
    }

    bool enabled() const { return dir_.has_value(); }
    sea::RunManifest& manifest() { return manifest_; }

    /// Writes `name` inside the output directory and records its digest.
    template <typename Writer>
    void write(const std::string& name, Writer&& writer) {
        if (!dir_) return;
        std::ostringstream buf;
        writer(buf);
        const std::string bytes = buf.str();
        std::ofstream f(*dir_ / name, std::ios::binary);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw std::runtime_error("cannot write " + (*dir_ / name).string());
        manifest_.outputs.push_back({name, sea::sha256_hex(bytes)});
    }

    int finish(int code, const std::string& status, const std::string& message = {}) {
        manifest_.exit_code = code;
        manifest_.status = status;
        manifest_.message = message;
        manifest_.wall_clock_s = std::chrono::duration<double>(Clock::now() - start_).count();
        if (dir_) {
            std::ofstream f(*dir_ / "manifest.json", std::ios::binary);
            f << sea::manifest_to_json(manifest_).dump(2) << '\n';
        }
        return code;
    }

private:
    std::optional<fs::path> dir_;
    sea::RunManifest manifest_;
    Clock::time_point start_;
};

/// defaults <- config (a key = value file, or a manifest.json from an earlier
/// run) <- --set.
sea::ConfigValues resolve(const CommonOptions& opt) {
    if (opt.config.size() > 5 && opt.config.ends_with(".json")) {
        std::ifstream in(opt.config, std::ios::binary);
        if (!in) throw sea::ConfigError("", opt.config, "cannot open manifest");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw sea::ConfigError("", opt.config, e.what());
        }
        sea::ConfigValues v = sea::values_from_manifest(j);
        for (const auto& o : opt.sets) sea::apply_override(v, o);
        return v;
    }
    return sea::resolve_config(opt.config, opt.sets);
}

nlohmann::ordered_json metrics_json(const sea::Metrics& m) {
    nlohmann::ordered_json j;
    j["transient_time"] = m.transient_time;
    j["settled"] = m.settled;
    j["max_abs_error_after_transient"] = m.max_abs_error_after_transient;
    j["max_error_window"] = {m.max_error_window.start, m.max_error_window.end};
    j["steady_state_error"] = m.steady_state_error;
    j["steady_window"] = {m.steady_window.start, m.steady_window.end};
    if (m.has_overshoot) j["overshoot_fraction"] = m.overshoot_fraction;
    j["sigma_rms_steady"] = m.sigma_rms_steady;
    return j;
}

int cmd_simulate(const CommonOptions& opt) {
    const sea::ConfigValues values = resolve(opt);
    const sea::SimConfig cfg = sea::build_sim_config(values);
    OutputDir out("simulate", opt);
    out.manifest().config = values;

    const sea::RunResult r = sea::run_simulation(cfg);
    out.write("trace.csv", [&](std::ostream& s) { sea::write_trace_csv(s, r.trace); });
    if (opt.plot) out.write("trace.svg", [&](std::ostream& s) { sea::write_trace_svg(s, r.trace); });

    if (r.metrics) {
        const auto& m = *r.metrics;
        out.manifest().results = metrics_json(m);
        std::printf("max |e1| after %.3g s: %.6g rad\n", cfg.metrics.transient_exclusion,
                    m.max_abs_error_after_transient);
        std::printf("transient time:        %.6g s%s\n", m.transient_time, m.settled ? "" : " (never settled)");
        std::printf("steady-state error:    %.6g rad\n", m.steady_state_error);
        if (m.has_overshoot) std::printf("overshoot fraction:    %.6g\n", m.overshoot_fraction);
        std::printf("sigma rms (steady):    %.6g\n", m.sigma_rms_steady);
    } else if (!r.message.empty()) {
        std::printf("no metrics: %s\n", r.message.c_str());
    }
    if (r.clamp_events > 0) std::printf("voltage clamp active on %ld updates\n", r.clamp_events);

    if (!r.ok()) {
        std::fprintf(stderr, "run %s at t = %.6g s: %s\n", sea::to_string(r.status), r.failure_time,
                     r.message.c_str());
        out.manifest().results["failure_time"] = r.failure_time;
        return out.finish(kRunFailed, sea::to_string(r.status), r.message);
    }
    return out.finish(kOk, "ok");
}

int cmd_sweep(const CommonOptions& opt) {
    const sea::ConfigValues values = resolve(opt);
    const sea::SimConfig cfg = sea::build_sim_config(values);
    const sea::SweepSpec spec = sea::build_sweep_spec(values);
    OutputDir out("sweep", opt);
    out.manifest().config = values;

    const auto rows = sea::gain_sweep(cfg, spec.axis, spec.values, opt.jobs);
    out.write("sweep.csv", [&](std::ostream& s) { sea::write_sweep_csv(s, spec.axis, rows); });
    if (!out.enabled()) sea::write_sweep_csv(std::cout, spec.axis, rows);

    long failed = 0;
    for (const auto& row : rows) {
        if (row.status != sea::RunStatus::ok) ++failed;
        std::printf("%s = %-10g %-12s", sea::to_string(spec.axis), row.value, sea::to_string(row.status));
        if (row.metrics)
            std::printf(" sse %.4g  tt %.4g  os %.4g  sigma_rms %.4g", row.metrics->steady_state_error,
                        row.metrics->transient_time, row.metrics->overshoot_fraction, row.metrics->sigma_rms_steady);
        std::printf("\n");
    }
    out.manifest().results["runs"] = rows.size();
    out.manifest().results["failed_runs"] = failed;
    return out.finish(kOk, failed ? "ok_with_failed_runs" : "ok");
}

int cmd_reduce_motor(const CommonOptions& opt) {
    const sea::ConfigValues values = resolve(opt);
    const sea::ReducedMotorModel red = sea::build_reduced_motor(values);
    const double rate = sea::ConfigReader(values).number("motor.rate");
    OutputDir out("reduce-motor", opt);
    out.manifest().config = values;

    constexpr double nominal_cv = 47.535;
    const double deviation = (red.c_v - nominal_cv) / nominal_cv;
    const double share = red.neglect_ratio(rate);
    std::printf("J_eq = %.6g kg m^2\n", red.J_eq);
    std::printf("A2 = %.6g  A1 = %.6g  A0 = %.6g\n", red.A2, red.A1, red.A0);
    std::printf("c_v = A0/A1 = %.6g 1/s (deviation from %.3f: %+.3f%%)\n", red.c_v, nominal_cv, 100.0 * deviation);
    std::printf("electrical pole A1/A2 = %.6g rad/s\n", red.electrical_pole);
    std::printf("dropped A2 term at %.4g rad/s: %.3f%% of the A1 term (%s 1%%)\n", rate, 100.0 * share,
                share < 0.01 ? "below" : "NOT below");
    if (red.prefactor) std::printf("prefactor 2 pi n / (l K_T) = %.6g\n", *red.prefactor);

    auto& res = out.manifest().results;
    res["J_eq"] = red.J_eq;
    res["A2"] = red.A2;
    res["A1"] = red.A1;
    res["A0"] = red.A0;
    res["c_v"] = red.c_v;
    res["c_v_deviation"] = deviation;
    res["neglect_rate"] = rate;
    res["neglect_ratio"] = share;
    return out.finish(kOk, "ok");
}

int cmd_validate(const CommonOptions& opt) {
    const sea::ConfigValues values = resolve(opt);
    sea::ValidationOptions vo;
    vo.base = sea::build_sim_config(values);
    OutputDir out("validate", opt);
    out.manifest().config = values;

    const sea::ValidationReport report = sea::run_validation_suite(vo);
    report.print(std::cout);
    out.write("validation.txt", [&](std::ostream& s) { report.print(s); });
    const bool ok = report.passed();
    std::printf("%s\n", ok ? "all checks passed" : "validation FAILED");
    return out.finish(ok ? kOk : kValidation, ok ? "ok" : "validation_failed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SEA hip joint simulator"};
    app.require_subcommand(1);
    CommonOptions opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "key = value configuration file");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--set", opt.sets, "override a key, key=value (repeatable)")->take_all();
        sub->add_option("--seed", opt.seed, "reserved; all computation is deterministic");
    };

    auto* simulate = app.add_subcommand("simulate", "closed-loop run, writes trace.csv");
    add_common(simulate);
    simulate->add_flag("--plot", opt.plot, "also write trace.svg");
    auto* sweep = app.add_subcommand("sweep", "one run per value of sweep.axis");
    add_common(sweep);
    sweep->add_option("--jobs", opt.jobs, "parallel runs")->check(CLI::PositiveNumber);
    auto* reduce = app.add_subcommand("reduce-motor", "reduce the motor model to U = v0' + c_v v0");
    add_common(reduce);
    auto* validate = app.add_subcommand("validate", "run the self-check suite");
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (reduce->parsed()) return cmd_reduce_motor(opt);
        if (validate->parsed()) return cmd_validate(opt);
    } catch (const sea::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const sea::DomainError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const sea::SingularConfigurationError& e) {
        std::fprintf(stderr, "singular configuration: %s\n", e.what());
        return kRunFailed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    }
    return kUsage;
}
