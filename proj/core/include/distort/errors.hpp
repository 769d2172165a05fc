#pragma once

#include <stdexcept>
#include <string>

namespace distort {

// The requested quantity does not exist for these inputs (infinite mean,
// unbounded essential supremum, ...) as opposed to the inputs being malformed.
class unsupported_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Choquet integral, or one of its one-sided pieces, fails to converge.
class divergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text input failed to parse. Carries the 1-based position of the offending
// character so the CLI can point at it.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  // The message without the appended position, for re-anchoring.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

// A VaR ratio whose denominator vanished. The numerator is kept so that
// superadditivity at the offending level stays visible to the caller.
class zero_denominator_error : public std::domain_error {
 public:
  explicit zero_denominator_error(double numerator);
  double numerator() const noexcept { return numerator_; }

 private:
  double numerator_;
};

}  // namespace distort
