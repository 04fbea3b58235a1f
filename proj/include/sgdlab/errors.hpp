#pragma once

#include <stdexcept>
#include <string>

namespace sgdlab {

// Error taxonomy mirrors the CLI exit codes: config/parameter -> 1,
// rejected theory hypotheses -> 2, file system -> 3.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ParamError : std::invalid_argument {
    explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

struct HypothesisError : std::runtime_error {
    explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sgdlab
