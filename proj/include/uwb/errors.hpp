#pragma once

#include <stdexcept>
#include <string>

namespace uwb {

// Input data or configuration violates a documented invariant.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem or serialization failure; the message names the path.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace uwb
