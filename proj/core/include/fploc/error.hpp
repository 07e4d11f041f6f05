#pragma once

#include <stdexcept>
#include <string>

namespace fploc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument values (non-finite inputs, shape mismatches, empty inputs).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Malformed file content; message carries the offending line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Iterative solver ran out of iterations; message carries the best-iterate state.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace fploc
