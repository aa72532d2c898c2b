#pragma once

#include <stdexcept>
#include <string>

namespace uiground {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: configs, datasets, arguments, violated preconditions.
struct ValidationError : Error {
    using Error::Error;
};

// Unreadable or unwritable files.
struct IoError : Error {
    using Error::Error;
};

// Failures talking to a model backend. The kind stays machine-readable so
// callers can branch on it (and the CLI can map it to exit codes).
struct BackendError : Error {
    enum class Kind { connect, timeout, status, schema, grid_mismatch };

    Kind kind;

    BackendError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
};

inline const char* to_string(BackendError::Kind k) {
    switch (k) {
        case BackendError::Kind::connect: return "connect";
        case BackendError::Kind::timeout: return "timeout";
        case BackendError::Kind::status: return "status";
        case BackendError::Kind::schema: return "schema";
        case BackendError::Kind::grid_mismatch: return "grid_mismatch";
    }
    return "unknown";
}

}  // namespace uiground
