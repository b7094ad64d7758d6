#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace foonlink {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed record in a FOON text document.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

// A unit that is lexically fine but incomplete (no motion line, no terminator).
class StructureError : public Error {
 public:
  StructureError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class StreamError : public Error {
 public:
  using Error::Error;
};

class UnresolvedUnit : public Error {
 public:
  using Error::Error;
};

}  // namespace foonlink
