#pragma once

#include <string>

namespace vvc {

// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

// Parses a decimal number, or a fraction "a/b" of two decimals evaluated as a/b
// in double arithmetic. Returns false on malformed input.
bool parse_number_or_fraction(const std::string& text, double& out);

}  // namespace vvc
