#pragma once

#include <stdexcept>
#include <string>

namespace gesture {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A file is missing, unreadable or unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file exists but its contents do not follow the expected layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace gesture
