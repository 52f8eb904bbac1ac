#pragma once

#include <stdexcept>
#include <string>

namespace dkr {

/// Raised when a parameter violates a precondition. `field()` names the offending key.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace dkr
