#pragma once

#include <stdexcept>
#include <string>

namespace uclf_adapt {

// Dimension or precondition mismatch on a public entry point.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid configuration; carries an optional source location.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string source = {},
                       int line = 0)
      : std::runtime_error(format(what, source, line)),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& what, const std::string& source,
                            int line) {
    if (source.empty()) return what;
    if (line <= 0) return source + ": " + what;
    return source + ":" + std::to_string(line) + ": " + what;
  }

  std::string source_;
  int line_;
};

}  // namespace uclf_adapt
