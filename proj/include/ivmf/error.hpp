#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ivmf {

// Machine-readable failure categories. Each maps to a stable token via
// errc_name() so callers (CLI, service) can report them without parsing text.
enum class Errc {
  file_not_found,
  malformed_document,
  schema_violation,
  type_error,
  invariant_violation,
  parse_error,
  unmapped_combination,
  no_components,
  non_finite,
  empty_input,
  length_mismatch,
  zero_variance,
  degenerate,
  out_of_range,
  too_few_protocols,
  invalid_argument,
  unsupported_format,
};

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::file_not_found: return "file_not_found";
    case Errc::malformed_document: return "malformed_document";
    case Errc::schema_violation: return "schema_violation";
    case Errc::type_error: return "type_error";
    case Errc::invariant_violation: return "invariant_violation";
    case Errc::parse_error: return "parse_error";
    case Errc::unmapped_combination: return "unmapped_combination";
    case Errc::no_components: return "no_components";
    case Errc::non_finite: return "non_finite";
    case Errc::empty_input: return "empty_input";
    case Errc::length_mismatch: return "length_mismatch";
    case Errc::zero_variance: return "zero_variance";
    case Errc::degenerate: return "degenerate";
    case Errc::out_of_range: return "out_of_range";
    case Errc::too_few_protocols: return "too_few_protocols";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::unsupported_format: return "unsupported_format";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// One located problem inside a document, e.g. {"protocols[3].pu", "expected integer"}.
struct Diagnostic {
  std::string location;
  std::string message;

  [[nodiscard]] std::string to_string() const {
    return location.empty() ? message : location + ": " + message;
  }
  bool operator==(const Diagnostic&) const = default;
};

// Raised by the document loaders; carries every diagnostic found, not just the first.
class DocumentError : public Error {
 public:
  DocumentError(Errc code, std::vector<Diagnostic> diagnostics)
      : Error(code, render(code, diagnostics)), diagnostics_(std::move(diagnostics)) {}

  [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string render(Errc code, const std::vector<Diagnostic>& diagnostics) {
    std::string text(errc_name(code));
    for (const auto& d : diagnostics) {
      text += "\n  ";
      text += d.to_string();
    }
    return text;
  }

  std::vector<Diagnostic> diagnostics_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& message)
      : Error(Errc::parse_error, message), offset_(offset), expected_(std::move(expected)) {}

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
  [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace ivmf
