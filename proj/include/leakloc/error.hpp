#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace leakloc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network or campaign document. Line is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidNetwork : public Error {
 public:
  using Error::Error;
};

/// Every partition balances although the parent envelope did not.
class NoLeakDetected : public Error {
 public:
  using Error::Error;
};

class MultipleLeaksInSingleLeakMode : public Error {
 public:
  using Error::Error;
};

class DisconnectedInput : public Error {
 public:
  using Error::Error;
};

class CampaignComplete : public Error {
 public:
  using Error::Error;
};

class ReadingMismatch : public Error {
 public:
  using Error::Error;
};

class VersionConflict : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace leakloc
