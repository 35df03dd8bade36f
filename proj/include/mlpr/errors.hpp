#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlpr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input outside the documented domain (negative tensor entry, alpha not in
// (0,1), non-stochastic vector, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

// The offdiagonal pattern does not connect `indices` to where they need to
// go (a positive sum for factorization, every node for strong connectivity).
class ReducibleError : public Error {
 public:
  ReducibleError(const std::string& what, std::vector<std::size_t> indices)
      : Error(what), indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

// Raised by the GTH elimination when GTH_ASSERT_NONNEG is enabled and an
// intermediate quantity that must be nonnegative is not.
class NonnegativityViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace mlpr
