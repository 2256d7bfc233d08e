#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sea {

/// Invalid parameter value (non-positive length, bad gain, negative time...).
/// `field()` names the offending parameter when one is identifiable.
class DomainError : public std::invalid_argument {
public:
    DomainError(std::string field, const std::string& what)
        : std::invalid_argument(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// The SEA line of action passes (numerically) through the hip pivot, so the
/// moment arm vanishes and force/torque conversions blow up.
class SingularConfigurationError : public std::runtime_error {
public:
    SingularConfigurationError(double angle, double arm)
        : std::runtime_error("singular configuration: moment arm " + std::to_string(arm) +
                             " m at theta = " + std::to_string(angle) + " rad"),
          angle_(angle), arm_(arm) {}

    double angle() const noexcept { return angle_; }
    double arm() const noexcept { return arm_; }

private:
    double angle_;
    double arm_;
};

/// A state component became non-finite or exceeded the divergence threshold.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double t, const std::string& what)
        : std::runtime_error("divergence at t = " + std::to_string(t) + " s: " + what), time_(t) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Trajectory file could not be ingested. `row()` is 1-based (0 when the
/// problem is not tied to a single row).
class IngestionError : public std::runtime_error {
public:
    IngestionError(std::size_t row, const std::string& what)
        : std::runtime_error(row ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Configuration key/value problem. `key()` is the dotted key, `location()`
/// is "file:line" or "--set" when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::string location, const std::string& what)
        : std::runtime_error(format(key, location, what)), key_(std::move(key)), location_(std::move(location)) {}

    const std::string& key() const noexcept { return key_; }
    const std::string& location() const noexcept { return location_; }

private:
    static std::string format(const std::string& key, const std::string& location, const std::string& what) {
        std::string out;
        if (!location.empty()) out += location + ": ";
        if (!key.empty()) out += "`" + key + "`: ";
        return out + what;
    }

    std::string key_;
    std::string location_;
};

/// Not enough data for a metric window.
class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sea
