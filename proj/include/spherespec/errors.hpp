#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spherespec {

/// Malformed textual input (kernel strings, decimal strings, JSON files).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"), position_(position) {}

  [[nodiscard]] std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A well-formed request outside an operation's domain (bad parameter ranges,
/// levels beyond truncation, non-positive-definite input where PD is required).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, long index)
      : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

  [[nodiscard]] long index() const { return index_; }

 private:
  long index_;
};

}  // namespace spherespec
