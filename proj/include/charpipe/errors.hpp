#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace charpipe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid UTF-8 input. `offset` is the byte offset of the bad sequence
/// within the buffer that was being decoded.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Structural error in an input file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Morpheme forms could not be placed on the surface word, or prediction and
/// gold sequences do not line up.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// A parameter or argument outside its valid range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace charpipe
