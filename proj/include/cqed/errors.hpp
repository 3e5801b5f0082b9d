#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

// invalid or inconsistent user-facing configuration (maps to CLI exit 2)
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key_path, const std::string& what)
        : std::runtime_error(key_path.empty() ? what : key_path + ": " + what),
          key_path_(key_path) {}
    const std::string& key_path() const { return key_path_; }

private:
    std::string key_path_;
};

// parameter regime with no valid solution, e.g. overdamped cavity or zero
// detuning (maps to CLI exit 3)
class PhysicsError : public std::runtime_error {
public:
    explicit PhysicsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cqed
