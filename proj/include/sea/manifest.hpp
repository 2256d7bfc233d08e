#pragma once

// Per-output-directory run manifest. The "config" object holds every resolved
// key as text, so feeding it back through values_from_manifest() rebuilds the
// same SimConfig bit for bit.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sea/config.hpp"

namespace sea {

inline constexpr const char* kToolVersion = "0.1.0";

struct OutputFile {
    std::string name;
    std::string sha256;
};

struct RunManifest {
    std::string command;
    std::optional<std::string> config_file;
    std::optional<std::string> config_digest;  ///< sha256 of the config file bytes
    ConfigValues config;
    double wall_clock_s{};
    std::string status;
    int exit_code{};
    std::string message;
    std::vector<OutputFile> outputs;
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
};

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["tool"] = "sea_sim";
    j["version"] = kToolVersion;
    j["command"] = m.command;
    j["config_file"] = m.config_file ? nlohmann::ordered_json(*m.config_file) : nlohmann::ordered_json(nullptr);
    j["config_digest"] =
        m.config_digest ? nlohmann::ordered_json(*m.config_digest) : nlohmann::ordered_json(nullptr);
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (const auto& [info, def] : config_schema()) {
        auto it = m.config.find(info.name);
        cfg[info.name] = it == m.config.end() ? def : it->second.value;
    }
    j["wall_clock_s"] = m.wall_clock_s;
    j["status"] = m.status;
    j["exit_code"] = m.exit_code;
    if (!m.message.empty()) j["message"] = m.message;
    auto& outs = j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& o : m.outputs) outs.push_back({{"file", o.name}, {"sha256", o.sha256}});
    j["results"] = m.results;
    return j;
}

/// Resolved configuration from a manifest's "config" object.
inline ConfigValues values_from_manifest(const nlohmann::json& j) {
    if (!j.contains("config") || !j["config"].is_object()) throw ConfigError("config", "manifest", "missing object");
    ConfigValues v = default_values();
    for (const auto& [key, value] : j["config"].items()) {
        if (!value.is_string()) throw ConfigError(key, "manifest", "value must be a string");
        set_value(v, key, value.get<std::string>(), "manifest");
    }
    return v;
}

}  // namespace sea
