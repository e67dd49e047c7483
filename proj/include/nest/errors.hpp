#pragma once

#include <stdexcept>
#include <string>

namespace nest {

// thrown for malformed run configs and bad CLI parameter combinations
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// thrown when a file cannot be read or written
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// thrown when a checkpoint fails structural or checksum validation
struct CheckpointError : std::runtime_error {
    explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kVersionString = "nest 1.0.0";

}  // namespace nest
