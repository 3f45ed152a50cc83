#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsq {

enum class ErrorKind {
  invalid_parameter,
  undefined_valuation,
  domain_error,
  incomplete_definition,
  degenerate_measure,
  not_structured,
  resource_limit,
  parse_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind is
/// stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::undefined_valuation: return "undefined-valuation";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::incomplete_definition: return "incomplete-definition";
    case ErrorKind::degenerate_measure: return "degenerate-measure";
    case ErrorKind::not_structured: return "not-structured";
    case ErrorKind::resource_limit: return "resource-limit";
    case ErrorKind::parse_error: return "parse-error";
  }
  return "unknown";
}

}  // namespace dsq
