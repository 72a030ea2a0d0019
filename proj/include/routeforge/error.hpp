#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace routeforge {

// Failure with a stable machine-readable code in front of the human message.
// Codes are what tests and the CLI dispatch on; messages are free text.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

}  // namespace routeforge
