#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "vvc/env.hpp"
#include "vvc/registry.hpp"

namespace vvc {

inline constexpr const char* kProtocolVersion = "vvc/1";

// One "vvc/1" session: newline-delimited JSON requests in, one JSON response
// line out per request. Failures are framed as {"error":{"code","message"}}
// and never end the session; only "close" or end of input does.
class StdioSession {
 public:
  explicit StdioSession(Registry registry);

  // Handles a single request line and returns the response line (no newline).
  std::string handle(const std::string& line);
  bool closed() const { return closed_; }

  // Reads requests until close or EOF. Returns the number of requests served.
  int serve(std::istream& in, std::ostream& out);

 private:
  Registry registry_;
  std::optional<Env> env_;
  std::string env_name_;
  bool closed_ = false;
};

}  // namespace vvc
