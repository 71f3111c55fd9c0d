#pragma once

#include <stdexcept>
#include <string>

namespace embexp {

// Invalid configuration or unusable input file (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text, e.g. invalid UTF-8 (CLI exit code 2).
struct InputError : std::runtime_error {
    InputError(const std::string& what, std::size_t offset)
        : std::runtime_error(what), byte_offset(offset) {}
    std::size_t byte_offset;
};

// An experiment precondition does not hold (CLI exit code 3).
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Artifacts produced by different runs do not agree (CLI exit code 4).
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File could not be read or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace embexp
