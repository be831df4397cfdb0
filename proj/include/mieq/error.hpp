#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mieq {

// Violated precondition on numeric input (out-of-range probability, k > n, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class ParseErrorKind { Empty, RaggedRow, Negative, NotInteger };

// Malformed table text. line/column are 1-based; column counts fields, not characters.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line), column_(column) {}

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace mieq
