#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tnm {

enum class Errc {
  invalid_argument,
  not_found,
  illegal_parent,
  duplicate_name,
  loop_forbidden,
  illegal_connection,
  causality_violation,
  protocol_violation,
  conflict,
  parse_error,
  integrity_error,
  format_version,
  io_error,
};

// Stable kebab-case identifier, e.g. "illegal-connection".
std::string_view to_string(Errc code);

struct Violation {
  Errc code;
  std::string message;

  bool operator==(const Violation&) const = default;
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Error(Errc code, const std::string& message, std::vector<Violation> violations);

  Errc code() const noexcept { return code_; }
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  Errc code_;
  std::vector<Violation> violations_;
};

}  // namespace tnm
