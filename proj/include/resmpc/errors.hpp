#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace resmpc {

enum class ErrorKind {
    InvalidInput,      // non-finite or out-of-domain arguments
    Parse,             // malformed file content
    Validation,        // well-formed input violating a data contract
    InsufficientData,  // not enough history for the requested operation
    Fit,               // regression failure (rank deficiency)
    Solver,            // optimizer diverged or produced non-finite values
    Io,                // filesystem access
    Usage,             // bad CLI invocation or configuration
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // CLI convention: 2 for user/config/data problems, 1 for runtime failures.
    int exit_code() const noexcept {
        switch (kind_) {
            case ErrorKind::InvalidInput:
            case ErrorKind::Parse:
            case ErrorKind::Validation:
            case ErrorKind::InsufficientData:
            case ErrorKind::Usage:
                return 2;
            default:
                return 1;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message) {
    throw Error(kind, std::move(message));
}

}  // namespace resmpc
