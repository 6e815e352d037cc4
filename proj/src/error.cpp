#include "tnm/error.hpp"

#include <utility>

namespace tnm {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::not_found: return "not-found";
    case Errc::illegal_parent: return "illegal-parent";
    case Errc::duplicate_name: return "duplicate-name";
    case Errc::loop_forbidden: return "loop-forbidden";
    case Errc::illegal_connection: return "illegal-connection";
    case Errc::causality_violation: return "causality-violation";
    case Errc::protocol_violation: return "protocol-violation";
    case Errc::conflict: return "conflict";
    case Errc::parse_error: return "parse-error";
    case Errc::integrity_error: return "integrity-error";
    case Errc::format_version: return "format-version";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error::Error(Errc code, const std::string& message, std::vector<Violation> violations)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      violations_(std::move(violations)) {}

}  // namespace tnm
