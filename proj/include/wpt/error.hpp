#pragma once

#include <stdexcept>
#include <string>

namespace wpt {

/// A call violated an operation's precondition (bad rate, empty waveform, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Scenario or model configuration is malformed. `section()` names the
/// offending config section, e.g. "transmitter".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string section, const std::string& message)
        : std::runtime_error("[" + section + "] " + message), section_(std::move(section))
    {
    }

    const std::string& section() const noexcept { return section_; }

private:
    std::string section_;
};

/// Reading or writing a file failed.
class IoError : public std::runtime_error {
public:
    IoError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path))
    {
    }

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace wpt
