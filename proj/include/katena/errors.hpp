#pragma once

#include <stdexcept>
#include <string>

namespace katena {

// Error categories map 1:1 onto CLI exit codes / C API status values.
enum class ErrorCode {
    Usage = 4,       // bad arguments, unreadable paths, misuse of the API
    Validation = 1,  // model parse errors and constraint violations
    Plan = 2,        // planning failures (hard dependency cycles, bad targets)
    Backend = 3,     // chain backend failures (unreachable endpoint, reverts)
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline Error usage_error(const std::string& msg) { return Error(ErrorCode::Usage, msg); }
inline Error validation_error(const std::string& msg) { return Error(ErrorCode::Validation, msg); }
inline Error plan_error(const std::string& msg) { return Error(ErrorCode::Plan, msg); }
inline Error backend_error(const std::string& msg) { return Error(ErrorCode::Backend, msg); }

}  // namespace katena
