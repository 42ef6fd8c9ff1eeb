#include "vvc/numfmt.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

namespace vvc {

std::string format_double(double x) {
  if (x == 0.0) return "0";  // also folds -0
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

namespace {

bool parse_plain(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace

bool parse_number_or_fraction(const std::string& text, double& out) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_plain(text, out);
  double num = 0.0, den = 0.0;
  if (!parse_plain(std::string_view(text).substr(0, slash), num)) return false;
  if (!parse_plain(std::string_view(text).substr(slash + 1), den)) return false;
  if (den == 0.0) return false;
  out = num / den;
  return true;
}

}  // namespace vvc
