#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace scrubber_ftc {

/// Invalid input: bad parameters, violated invariants, malformed files.
/// Carries every violation found, not just the first one.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& message)
      : std::invalid_argument(message), violations_{message} {}
  explicit ValidationError(std::vector<std::string> violations)
      : std::invalid_argument(join(violations)),
        violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// Mathematical domain violation (square root of a negative pressure,
/// singular matrix, unsupported damping range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Runtime failure while simulating: the instability guard tripped or an
/// observer design could not be realized.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scrubber_ftc
