#pragma once

#include <stdexcept>
#include <string>

namespace esp {

/// Invalid user-supplied configuration (sizes, probabilities, config keys).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed text input (rule strings, CSV files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace esp
