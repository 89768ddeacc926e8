#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bhi {

/// Failure carrying the module it originated in, so CLI errors can be
/// reported as "module: message" with a nonzero exit code.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

}  // namespace bhi
