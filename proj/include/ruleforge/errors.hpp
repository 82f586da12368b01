#pragma once

#include <stdexcept>
#include <string>

namespace ruleforge {

// Violation of an internal invariant (certificate failure, broken partition,
// pivot limit). Maps to CLI exit code 2, as opposed to usage/data errors
// (std::runtime_error and friends) which map to exit code 1.
class internal_error : public std::logic_error {
public:
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace ruleforge
