#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace invivo {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct OutOfBounds : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Two poses share a position, so no direction can be derived.
struct DegenerateGeometry : std::domain_error {
  using std::domain_error::domain_error;
};

// An artifact could not be read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Carries every violation found, not only the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace invivo
