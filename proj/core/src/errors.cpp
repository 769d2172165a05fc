#include "distort/errors.hpp"

namespace distort {

parse_error::parse_error(const std::string& msg, int line, int column)
    : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ")"),
      message_(msg),
      line_(line),
      column_(column) {}

zero_denominator_error::zero_denominator_error(double numerator)
    : std::domain_error("VaR ratio denominator is zero (numerator = " +
                        std::to_string(numerator) + ")"),
      numerator_(numerator) {}

}  // namespace distort
