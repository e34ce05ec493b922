#pragma once

#include <stdexcept>
#include <string>

namespace simplesmt {

// Base for every error raised by the toolkit. The CLI maps ConfigError to
// exit status 1 and everything else to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad option values or malformed configuration files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that violates a precondition (line-count mismatch, empty corpus,
// missing artifact, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// The two sides of a parallel corpus do not line up.
class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

class EncodingError : public DataError {
 public:
  EncodingError(const std::string& path, std::size_t line)
      : DataError(path + ":" + std::to_string(line) + ": invalid UTF-8"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Malformed model files (ARPA, phrase table, ...). Carries the 1-based line.
class ParseError : public DataError {
 public:
  ParseError(const std::string& where, std::size_t line, const std::string& what)
      : DataError(where + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DecodeError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace simplesmt
